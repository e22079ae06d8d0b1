"""
Runtime settings for gaugemeas.

Every tunable is read from the environment (a local .env file is honoured) so
that desk runs, CI and the campaign worker share one source of configuration.
"""

import copy
import logging
import logging.config
import os
from datetime import datetime
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

DEBUG = os.environ.get("DEBUG", "false").lower() == "true"

# Simulation limits
QUBIT_CEILING = int(os.environ.get("GAUGEMEAS_QUBIT_CEILING", "24"))
DENSE_ORACLE_MAX = int(os.environ.get("GAUGEMEAS_DENSE_ORACLE_MAX", "12"))

# Search budgets
DISTANCE_BUDGET = int(os.environ.get("GAUGEMEAS_DISTANCE_BUDGET", "6"))
CHEEGER_BITS = int(os.environ.get("GAUGEMEAS_CHEEGER_BITS", "22"))
EXHAUSTIVE_BITS = int(os.environ.get("GAUGEMEAS_EXHAUSTIVE_BITS", "20"))

# Runs
DEFAULT_SEED = int(os.environ.get("GAUGEMEAS_DEFAULT_SEED", "7"))
FIDELITY_TOL = float(os.environ.get("GAUGEMEAS_FIDELITY_TOL", "1e-9"))

# Campaign orchestration
TEMPORAL_HOST = os.environ.get("TEMPORAL_HOST", "localhost:7233")
TEMPORAL_NAMESPACE = os.environ.get("TEMPORAL_NAMESPACE", "default")
TASK_QUEUE = os.environ.get("TASK_QUEUE", "gauging-campaign-task-queue")
CAMPAIGN_CHUNK = int(os.environ.get("GAUGEMEAS_CAMPAIGN_CHUNK", "25"))
WORKER_SLOTS = int(os.environ.get("GAUGEMEAS_WORKER_SLOTS", "4"))

LOG_DIR = Path(os.environ.get("GAUGEMEAS_LOG_DIR", str(BASE_DIR / "logs")))
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s'


# Logging Configuration
# stdout carries JSON reports, so the console handler writes to stderr
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'standard': {'format': LOG_FORMAT},
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'standard',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'INFO',
    },
    'loggers': {
        'gaugemeas': {'level': 'DEBUG' if DEBUG else 'INFO', 'propagate': True},
        'temporalio': {'level': 'DEBUG' if DEBUG else 'INFO', 'propagate': True},
    },
}


def logging_config(debug_mode: bool = False, log_file: Optional[Path] = None) -> dict:
    """LOGGING with the level for ``debug_mode`` and, given ``log_file``, a UTF-8 file handler"""
    config = copy.deepcopy(LOGGING)
    level = 'DEBUG' if debug_mode else 'INFO'
    config['root']['level'] = level
    for name in ('gaugemeas', 'temporalio'):
        config['loggers'][name]['level'] = level
    if log_file is not None:
        config['handlers']['file'] = {
            'level': 'DEBUG',
            'class': 'logging.FileHandler',
            'filename': str(log_file),
            'encoding': 'utf-8',
            'formatter': 'standard',
        }
        config['root']['handlers'].append('file')
    return config


def setup_logging(debug_mode: bool = False, to_file: bool = True) -> logging.Logger:
    """Configure logging with optional debug mode"""
    log_filename = None
    if to_file:
        LOG_DIR.mkdir(parents=True, exist_ok=True)
        log_filename = LOG_DIR / f'gaugemeas_{datetime.now().strftime("%Y%m%d_%H%M%S")}.log'

    logging.config.dictConfig(logging_config(debug_mode, log_filename))

    logger = logging.getLogger('gaugemeas')
    if log_filename is not None:
        logger.info(f"Logging initialized. Log file: {log_filename}")
    logger.debug(f"Debug mode: {'ON' if debug_mode else 'OFF'}")
    return logger
