import os
import logging
from dotenv import load_dotenv

load_dotenv()

# Randomness and parallelism
DEFAULT_SEED = int(os.environ.get('SPHEREBITS_SEED', '0'))
DEFAULT_THREADS = int(os.environ.get('SPHEREBITS_THREADS', '1'))

# Logging
LOG_LEVEL = os.environ.get('SPHEREBITS_LOG_LEVEL', 'INFO').upper()
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Caches and memory ceilings
PARTITION_CACHE_SIZE = int(os.environ.get('SPHEREBITS_PARTITION_CACHE_SIZE', '64'))
MAX_FAMILY_PAIRS = float(os.environ.get('SPHEREBITS_MAX_FAMILY_PAIRS', '4.0e7'))
MC_CHUNK = int(os.environ.get('SPHEREBITS_MC_CHUNK', '65536'))

# Numerics
QUAD_TOL = float(os.environ.get('SPHEREBITS_QUAD_TOL', '1e-12'))


def configure_logging(level: str = None) -> None:
    """Configure root logging for command-line use (stderr, base format)"""
    logging.basicConfig(
        level=getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO),
        format=LOG_FORMAT
    )
