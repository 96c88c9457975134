import logging
import os
from dotenv import load_dotenv

# CURRICULUM_LOG_DIR and CURRICULUM_LOG_LEVEL may come from a local .env file.
load_dotenv()

LOG_FOLDER: str = os.getenv("CURRICULUM_LOG_DIR", "logs")
LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT: str = "%Y-%m-%d %H:%M:%S"

os.makedirs(LOG_FOLDER, exist_ok=True)

_formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)


def _console_level(default: int) -> int:
    """Returns the console level from CURRICULUM_LOG_LEVEL, or the given default."""
    name = os.getenv("CURRICULUM_LOG_LEVEL")
    if not name:
        return default
    level = logging.getLevelName(name.strip().upper())
    return level if isinstance(level, int) else default


def _handler(handler: logging.Handler, level: int) -> logging.Handler:
    handler.setLevel(level)
    handler.setFormatter(_formatter)
    return handler


def get_logger(module_name: str, log_level: int = logging.DEBUG) -> logging.Logger:
    """
    Returns the logger of one module, attaching its handlers on first use.

    Records go to ``<LOG_FOLDER>/<module_name>.log`` at ``log_level`` and to the
    console at CURRICULUM_LOG_LEVEL when that is set. Later calls for the same
    module reuse the existing handlers.

    Args:
        module_name (str): Logger name and log file stem (e.g. 'train', 'nsp', 'app').
        log_level (int): Minimum level of the logger and its file.

    Returns:
        logging.Logger: The configured module logger.
    """
    log_file: str = os.path.join(LOG_FOLDER, f"{module_name}.log")
    logger: logging.Logger = logging.getLogger(module_name)
    logger.setLevel(log_level)

    if not logger.handlers:
        logger.addHandler(_handler(logging.FileHandler(log_file, mode="a", encoding="utf-8"), log_level))
        logger.addHandler(_handler(logging.StreamHandler(), _console_level(log_level)))
        logger.debug(f"Logger '{module_name}' writing to {log_file}")
    return logger
