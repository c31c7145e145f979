import os
from dotenv import load_dotenv

# 获取项目根目录路径
ROOT_DIR = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

# 加载.env文件（优先从项目根目录加载）
env_path = os.path.join(ROOT_DIR, '.env')
load_dotenv(dotenv_path=env_path)


def _getbool(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ('1', 'true', 'yes', 'on')


# Experiment defaults
DATASET = os.getenv('GAI_DATASET', 'SynthSmall')
ALGORITHMS = os.getenv('GAI_ALGORITHMS', 'HDoC,LUCBG,APTG,TTTS,SoftUCBG,DGAI-offline').split(',')
REPETITIONS = int(os.getenv('GAI_REPETITIONS', 10))
BASE_SEED = int(os.getenv('GAI_BASE_SEED', 0))
INSTANCE_SEED = int(os.getenv('GAI_INSTANCE_SEED', 0))
SCALE = float(os.getenv('GAI_SCALE', 1.0))
EPOCHS = int(os.getenv('GAI_EPOCHS', 50))
OUTPUT_DIR = os.getenv('GAI_OUTPUT_DIR', os.path.join(ROOT_DIR, 'results'))
EMIT_POLICY_LOG = _getbool('GAI_EMIT_POLICY_LOG', 'false')
JOBS = int(os.getenv('GAI_JOBS', 1))
SERIES_POINTS = int(os.getenv('GAI_SERIES_POINTS', 100))
SMOOTH_WINDOW = int(os.getenv('GAI_SMOOTH', 0))  # 0: 不做平滑

# Identification
DELTA = float(os.getenv('GAI_DELTA', 0.1))
# 空值表示与DELTA相同
DELTA_POLICY = float(os.getenv('GAI_DELTA_POLICY')) if os.getenv('GAI_DELTA_POLICY') else None

# Baseline knobs
APT_ARGMIN = _getbool('GAI_APT_ARGMIN', 'false')
LUCB_INCLUDE_T = _getbool('GAI_LUCB_INCLUDE_T', 'false')
TTTS_RESAMPLE_PROB = float(os.getenv('GAI_TTTS_RESAMPLE_PROB', 0.5))
TTTS_MAX_RESAMPLES = int(os.getenv('GAI_TTTS_MAX_RESAMPLES', 100))

# DGAI training
LEARNING_RATE = float(os.getenv('GAI_LEARNING_RATE', 0.1))
ETA1 = float(os.getenv('GAI_ETA1', 1e-3))
ETA2 = float(os.getenv('GAI_ETA2', 1e-3))
SHARPNESS_M = float(os.getenv('GAI_SHARPNESS_M', 100.0))
BATCH_SIZE = int(os.getenv('GAI_BATCH_SIZE', 128))
ALPHA_INIT = float(os.getenv('GAI_ALPHA_INIT', 0.0))
BETA_INIT = float(os.getenv('GAI_BETA_INIT', 0.0))
DIVERGENCE_LIMIT = float(os.getenv('GAI_DIVERGENCE_LIMIT', 1e6))
# 单条训练轨迹缓冲区的内存上限 (GB)
BUFFER_MAX_GB = float(os.getenv('GAI_BUFFER_MAX_GB', 4.0))

# Synthetic instances (均匀分布区间)
SYNTH_MEAN_LOW = float(os.getenv('GAI_SYNTH_MEAN_LOW', 0.49975))
SYNTH_MEAN_HIGH = float(os.getenv('GAI_SYNTH_MEAN_HIGH', 0.5005))
GAUSSIAN_SIGMA = float(os.getenv('GAI_GAUSSIAN_SIGMA', 0.1))

# Ratings / click logs
CSV_PATH = os.getenv('GAI_CSV_PATH', '')
RATING_COLUMN = os.getenv('GAI_RATING_COLUMN', 'rating')
ITEM_COLUMN = os.getenv('GAI_ITEM_COLUMN', 'item_id')
THRESHOLD_PERCENTILE = float(os.getenv('GAI_THRESHOLD_PERCENTILE', 95.0))

# Logging
LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
LOG_FILE = os.getenv('LOG_FILE', os.path.join(ROOT_DIR, 'gai_bench.log'))
