"""Tests for logging configuration."""

import logging

import pytest

from controlled_modules.logging_config import get_logger, log_context, logger, setup_logging
from controlled_modules.workbench import run_scenario


@pytest.fixture
def log_file(tmp_path):
    path = tmp_path / "logs" / "run.log"
    setup_logging(log_file=path, debug=True)
    yield path
    for handler in list(logger.handlers):
        handler.close()
    logger.handlers.clear()
    logger.setLevel(logging.WARNING)


class TestLogContext:
    """Tests for scenario and step fields on log records."""

    def test_outside_a_scenario(self, log_file):
        get_logger("modules").debug("plain")
        assert "[-:-] plain" in log_file.read_text()

    def test_nested_context(self, log_file):
        with log_context(scenario="demo"):
            with log_context(step="s1"):
                get_logger("telescope").info("inside")
            get_logger("telescope").info("between")
        text = log_file.read_text()
        assert "controlled_modules.telescope - INFO - [demo:s1] inside" in text
        assert "[demo:-] between" in text

    def test_context_is_restored_after_errors(self, log_file):
        with pytest.raises(RuntimeError):
            with log_context(scenario="demo", step="s1"):
                raise RuntimeError("boom")
        get_logger("k0").info("after")
        assert "[-:-] after" in log_file.read_text()

    def test_scenario_steps_are_tagged(self, log_file):
        run_scenario({
            "version": "1.0",
            "name": "tagged",
            "ring": {"kind": "Z"},
            "steps": [{"op": "interval-calc", "name": "I", "interval": "fwd"}],
        })
        text = log_file.read_text()
        assert "[tagged:I] running interval-calc" in text
        assert "[tagged:-] 1 steps ok" in text

    def test_creates_log_directory(self, log_file):
        assert log_file.parent.is_dir()
