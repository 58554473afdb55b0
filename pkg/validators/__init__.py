# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：__init__.py
@Description：评分表与事件流的结构 / 业务校验，以及极限律验收阈值检查
"""

from .business_validator import BusinessValidationResult, ScoreTableBusinessValidator
from .limit_checker import LimitCheckResult, LimitChecker, LimitInput
from .schema_validator import (
    EventSchemaValidator,
    SchemaValidationResult,
    ScoreTableSchemaValidator,
    validate_event_record,
)

__all__ = [
    "BusinessValidationResult",
    "EventSchemaValidator",
    "LimitCheckResult",
    "LimitChecker",
    "LimitInput",
    "SchemaValidationResult",
    "ScoreTableBusinessValidator",
    "ScoreTableSchemaValidator",
    "validate_event_record",
]
