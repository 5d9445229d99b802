"""Pytest config: tests/ on sys.path for helpers.py, and a clean IapunBench logger per test."""

import logging
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from minimax_problem import LOGGER_NAME  # noqa: E402


@pytest.fixture(autouse=True)
def _restore_bench_logger():
    """CLI tests call setup_logging; undo its level and handlers afterwards."""
    logger = logging.getLogger(LOGGER_NAME)
    level, handlers = logger.level, list(logger.handlers)
    yield
    for handler in list(logger.handlers):
        if handler not in handlers:
            logger.removeHandler(handler)
    logger.setLevel(level)
