import logging
import os

import pytest

from utils.logger import LOG_FOLDER, _console_level, get_logger


def test_generate_logs_for_modules() -> None:
    """Tests that get_logger writes every level into the module's own log file.

    This test obtains a logger for a throwaway module name, writes messages at levels
    DEBUG through CRITICAL, flushes the FileHandler(s), and then verifies that:

      - The module log file is created inside LOG_FOLDER.
      - The file contains all expected log messages.

    Returns:
        None
    """
    log_file_path: str = os.path.join(LOG_FOLDER, "logger_check.log")
    logger: logging.Logger = get_logger("logger_check", log_level=logging.DEBUG)

    logger.debug("Debug log - curriculum logger configuration")
    logger.info("Info log - curriculum logger configuration")
    logger.warning("Warning log - curriculum logger configuration")
    logger.error("Error log - curriculum logger configuration")
    logger.critical("Critical log - curriculum logger configuration")

    for handler in logger.handlers:
        if isinstance(handler, logging.FileHandler):
            handler.flush()

    assert os.path.exists(log_file_path), f"Expected log file {log_file_path} does not exist!"

    with open(log_file_path, "r", encoding="utf-8") as log_file:
        logs = log_file.read()
    for level in ("Debug", "Info", "Warning", "Error", "Critical"):
        assert f"{level} log - curriculum logger configuration" in logs, f"{level.upper()} log message missing!"


def test_get_logger_does_not_duplicate_handlers() -> None:
    """Asking twice for the same module returns one logger with one file and one console handler."""
    first = get_logger("logger_twice")
    second = get_logger("logger_twice")
    assert first is second
    assert len(second.handlers) == 2


@pytest.mark.parametrize(
    "value, expected",
    [(None, logging.DEBUG), ("warning", logging.WARNING), (" ERROR ", logging.ERROR), ("loud", logging.DEBUG)],
)
def test_console_level_from_environment(monkeypatch: pytest.MonkeyPatch, value, expected: int) -> None:
    """CURRICULUM_LOG_LEVEL sets the console level; unknown names fall back to the default."""
    if value is None:
        monkeypatch.delenv("CURRICULUM_LOG_LEVEL", raising=False)
    else:
        monkeypatch.setenv("CURRICULUM_LOG_LEVEL", value)
    assert _console_level(logging.DEBUG) == expected
