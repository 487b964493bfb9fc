"""工具包统一日志对象。"""

from __future__ import annotations

import logging

logger = logging.getLogger("mimo_rwma")

_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def setup_logging(level: str = "INFO") -> None:
    """配置根日志输出，仅命令行入口调用。"""
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        numeric = logging.INFO
    logging.basicConfig(level=numeric, format=_FORMAT)
    logger.setLevel(numeric)
