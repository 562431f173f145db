import logging
import sys

# Configure logging
logging.basicConfig(level=logging.WARNING,
                   format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
                   handlers=[
                       logging.StreamHandler(sys.stderr)
                   ])

# Create main package logger
logger = logging.getLogger("syndetic")

# Create per-component loggers
groups_logger = logging.getLogger("syndetic.groups")
sets_logger = logging.getLogger("syndetic.sets")
windows_logger = logging.getLogger("syndetic.windows")
engine_logger = logging.getLogger("syndetic.engine")
strong_logger = logging.getLogger("syndetic.strong")
symmetric_logger = logging.getLogger("syndetic.symmetric")
dynamics_logger = logging.getLogger("syndetic.dynamics")
store_logger = logging.getLogger("syndetic.store")
cli_logger = logging.getLogger("syndetic.cli")


def set_verbosity(verbose: bool) -> None:
    """Switch the package loggers between WARNING and INFO"""
    logger.setLevel(logging.INFO if verbose else logging.WARNING)
