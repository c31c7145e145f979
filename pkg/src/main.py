import argparse
import logging
import os
import sys
import traceback
from typing import List, Optional

# 修复导入路径问题
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.config import settings
from src.harness.experiment import EXIT_CONFIG_ERROR, EXIT_ALL_FAILED, run_experiment
from src.harness.experiment_config import ConfigError, load_config
from src.harness.plot_series import emit_plot_series

logger = logging.getLogger(__name__)


def configure_logging(level: Optional[str] = None):
    """Log to settings.LOG_FILE and stdout in one format."""
    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(settings.LOG_FILE),
            logging.StreamHandler(sys.stdout)
        ],
        force=True,
    )


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """解析命令行参数"""
    parser = argparse.ArgumentParser(description='Good-arm identification benchmark')
    parser.add_argument('--config', type=str, help='Flat KEY=VALUE experiment file')
    parser.add_argument('--dataset', type=str, help='Dataset preset (SynthSmall, SynthLarge, ...)')
    parser.add_argument('--algo', type=str, help='Comma-separated algorithm names')
    parser.add_argument('--reps', type=int, help='Repetitions per algorithm')
    parser.add_argument('--seed', type=int, help='Base seed; run r uses seed + r')
    parser.add_argument('--instance-seed', type=int, help='Seed of the synthetic arm means')
    parser.add_argument('--scale', type=float, help='Shrink K and T by this factor, in (0, 1]')
    parser.add_argument('--epochs', type=int, help='Offline training epochs')
    parser.add_argument('--horizon', type=int, help='Override the preset horizon T')
    parser.add_argument('--out', type=str, help='Output directory of the results bundle')
    parser.add_argument('--jobs', type=int, help='Concurrent runs')
    parser.add_argument('--smooth', type=int, help='Trailing moving-average window for figure files')
    parser.add_argument('--emit-policy-log', action='store_true', default=None,
                        help='Write per-round policies of softmax algorithms')
    parser.add_argument('--series-only', type=str, metavar='BUNDLE',
                        help='Only re-emit the figure files of an existing bundle')
    parser.add_argument('--log-level', type=str, help='DEBUG, INFO, WARNING or ERROR')
    return parser.parse_args(argv)


def run_cli(argv: Optional[List[str]] = None) -> int:
    """Run the benchmark; returns the process exit code."""
    args = parse_args(argv)
    configure_logging(args.log_level)

    if args.series_only:
        try:
            emit_plot_series(args.series_only, smooth=args.smooth or 0)
        except FileNotFoundError as e:
            logger.error(str(e))
            return EXIT_CONFIG_ERROR
        return 0

    overrides = {
        'dataset': args.dataset,
        'algorithms': args.algo.split(',') if args.algo else None,
        'repetitions': args.reps,
        'base_seed': args.seed,
        'instance_seed': args.instance_seed,
        'scale': args.scale,
        'epochs': args.epochs,
        'horizon': args.horizon,
        'output_dir': args.out,
        'jobs': args.jobs,
        'smooth': args.smooth,
        'emit_policy_log': args.emit_policy_log,
    }
    try:
        config = load_config(args.config, overrides)
        logger.info(f"Starting benchmark: dataset={config.dataset}, algorithms={config.algorithms}, "
                    f"reps={config.repetitions}, scale={config.scale}")
        result = run_experiment(config)
    except ConfigError as e:
        logger.error(f"Config error: {str(e)}")
        return EXIT_CONFIG_ERROR
    except OSError as e:
        # results bundle could not be written
        logger.error(f"Output error: {str(e)}")
        return EXIT_CONFIG_ERROR
    except Exception as e:
        logger.error(f"Unhandled exception: {str(e)}")
        logger.error(traceback.format_exc())
        return EXIT_ALL_FAILED

    logger.info(f"Benchmark finished: {result.n_runs - result.n_failed}/{result.n_runs} runs succeeded")
    return result.exit_code


def main():
    """Main entry point."""
    try:
        sys.exit(run_cli())
    except KeyboardInterrupt:
        logger.info("Keyboard interrupt received, shutting down...")
        sys.exit(130)


if __name__ == "__main__":
    main()
