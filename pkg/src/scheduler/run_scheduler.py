import asyncio
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, List, Optional, Sequence

from src.config import settings

logger = logging.getLogger(__name__)


class RunScheduler:
    """Runs independent experiment tasks, at most ``jobs`` at a time.

    With one job every task runs inline in submission order. With more, tasks
    go to a process pool and an asyncio semaphore caps how many are in flight.
    Results always come back in submission order.
    """

    def __init__(self, jobs: Optional[int] = None):
        """Initialize the run scheduler.

        Args:
            jobs: Maximum number of concurrently running tasks
        """
        self.jobs = jobs or settings.JOBS
        if self.jobs < 1:
            raise ValueError(f"jobs must be at least 1, got {self.jobs}")
        self.semaphore = None  # created inside the event loop
        self.completed = 0

    def run_all(self, tasks: Sequence[Any], worker: Callable[[Any], Any]) -> List[Any]:
        """Apply ``worker`` to every task.

        ``worker`` must be a module-level function when jobs > 1 so it can be
        sent to the worker processes.
        """
        start_time = time.time()
        self.completed = 0
        if self.jobs == 1 or len(tasks) <= 1:
            results = []
            for task in tasks:
                results.append(worker(task))
                self._progress(len(tasks))
        else:
            results = asyncio.run(self._run_pool(tasks, worker))

        elapsed = time.time() - start_time
        logger.info(f"Finished {len(tasks)} runs in {elapsed:.2f} seconds ({self.jobs} jobs)")
        return results

    async def _run_pool(self, tasks: Sequence[Any], worker: Callable[[Any], Any]) -> List[Any]:
        self.semaphore = asyncio.Semaphore(self.jobs)
        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=self.jobs) as pool:

            async def run_with_semaphore(task):
                async with self.semaphore:
                    result = await loop.run_in_executor(pool, worker, task)
                    self._progress(len(tasks))
                    return result

            # gather keeps submission order
            return await asyncio.gather(*(run_with_semaphore(task) for task in tasks))

    def _progress(self, total: int):
        self.completed += 1
        if self.completed % 10 == 0 or self.completed == total:
            logger.info(f"Processed {self.completed}/{total} runs")
