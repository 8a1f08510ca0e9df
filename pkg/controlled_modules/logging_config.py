"""Logging configuration for controlled-modules.

Records carry the scenario and step they were emitted under, so a log of a
long run can be read step by step.  Outside a scenario both fields are "-".
"""

import logging
import sys
from contextlib import contextmanager
from contextvars import ContextVar
from pathlib import Path
from typing import Iterator, Optional

# Package logger
logger = logging.getLogger("controlled_modules")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - [%(scenario)s:%(step)s] %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

_scenario: ContextVar[str] = ContextVar("scenario", default="-")
_step: ContextVar[str] = ContextVar("step", default="-")


class StepContextFilter(logging.Filter):
    """Stamp records with the current scenario and step."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.scenario = _scenario.get()
        record.step = _step.get()
        return True


@contextmanager
def log_context(scenario: Optional[str] = None, step: Optional[str] = None) -> Iterator[None]:
    """Tag every record logged inside the block with a scenario and/or step."""
    tokens = []
    if scenario is not None:
        tokens.append((_scenario, _scenario.set(scenario)))
    if step is not None:
        tokens.append((_step, _step.set(step)))
    try:
        yield
    finally:
        for var, token in reversed(tokens):
            var.reset(token)


def setup_logging(
    level: int = logging.WARNING,
    log_file: Optional[Path] = None,
    debug: bool = False
) -> None:
    """Configure logging for the application.

    Args:
        level: Logging level (default: WARNING, the CLI prints its own results)
        log_file: Optional file path for logging
        debug: If True, set level to DEBUG
    """
    if debug:
        level = logging.DEBUG

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)
    context = StepContextFilter()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    console_handler.addFilter(context)

    logger.setLevel(level)
    logger.handlers.clear()
    logger.addHandler(console_handler)

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        file_handler.addFilter(context)
        logger.addHandler(file_handler)

    logger.debug("Logging configured: level=%s, file=%s", level, log_file)


def get_logger(name: str) -> logging.Logger:
    """Get a logger below the package logger, e.g. ``get_logger("telescope")``."""
    return logging.getLogger(f"controlled_modules.{name}")
