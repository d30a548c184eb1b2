"""Test the emoji log formatter."""

import logging

from src.factoriza.utils.logger import EmojiFormatter, setup_logger


def _record(level, **extra):
    record = logging.LogRecord("src.factoriza", level, __file__, 1, "msg", None, None)
    record.__dict__.update(extra)
    return record


def test_level_emoji():
    """Test that records without a tag use their level"""
    formatter = EmojiFormatter("%(emoji)s %(message)s")
    assert formatter.format(_record(logging.WARNING)) == "⚠️ msg"


def test_tag_emoji():
    """Test that a tag overrides the level"""
    formatter = EmojiFormatter("%(emoji)s %(message)s")
    assert formatter.format(_record(logging.INFO, tag="PASS")) == "✅ msg"
    assert formatter.format(_record(logging.INFO, tag="FAIL")) == "💥 msg"
    assert formatter.format(_record(logging.INFO, tag="SEARCH")) == "🔎 msg"
    assert formatter.format(_record(logging.INFO, tag="other")) == "📌 msg"


def test_setup_logger_single_handler():
    """Test that repeated setup does not stack handlers"""
    logger = setup_logger("src.factoriza.test_logger", "debug")
    setup_logger("src.factoriza.test_logger", "debug")
    assert logger.level == logging.DEBUG
    assert len(logger.handlers) == 1
    assert not logger.propagate
