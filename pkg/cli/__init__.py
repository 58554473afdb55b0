# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：__init__.py
@Description：rdl 命令行（simulate / cohort / analyze / score / regress）
"""

from .main import build_parser, main

__all__ = ["build_parser", "main"]
