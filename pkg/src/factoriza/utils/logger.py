"""
Logging utility with emoji support, used by the command line front end
"""

import logging
import sys

# Emojiとログレベルのマッピング
EMOJI_MAP = {
    "DEBUG": "🔍",
    "INFO": "📝",
    "WARNING": "⚠️",
    "ERROR": "❌",
    "CRITICAL": "🚨",
    "PASS": "✅",
    "FAIL": "💥",
    "SEARCH": "🔎",
}


class EmojiFormatter(logging.Formatter):
    """カスタムフォーマッタでemoji付きログを生成"""

    def format(self, record):
        record.emoji = EMOJI_MAP.get(getattr(record, "tag", record.levelname), "📌")
        return super().format(record)


def setup_logger(name: str = "src.factoriza", level: str = "INFO") -> logging.Logger:
    """
    パッケージ用のロガーをセットアップ

    Reports go to stdout, so log records are written to stderr.

    Args:
        name: ロガーの名前
        level: ログレベル名

    Returns:
        設定済みのロガーインスタンス
    """
    logger = logging.getLogger(name)
    logger.setLevel(level.upper())

    fmt = "%(emoji)s %(asctime)s [%(name)s] %(levelname)s: %(message)s"
    formatter = EmojiFormatter(fmt, datefmt="%Y-%m-%d %H:%M:%S")

    if not any(getattr(h, "_factoriza", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(formatter)
        handler._factoriza = True  # type: ignore[attr-defined]
        logger.addHandler(handler)
    logger.propagate = False
    return logger
