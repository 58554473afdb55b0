# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：__init__.py
@Description：结构化日志与 run id（trace）
"""

from .logger import SimpleLogger, get_logger
from .trace import get_trace, new_trace

__all__ = ["SimpleLogger", "get_logger", "get_trace", "new_trace"]
