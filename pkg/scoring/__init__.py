# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：__init__.py
@Description：表驱动的九因子风险评分（FTA / NCA / NVCA）
"""

from .events import EventKind, EventStreamError, HistoryEvent, Severity, parse_events, read_events
from .factors import CurrentCharge, DefendantRecord, derive_factors, parse_records, read_records
from .scorer import RiskScores, describe_scores, raw_points, score, score_arrays
from .table import (
    FIXTURE_TABLE_PATH,
    FactorPoints,
    ScoreTable,
    ScoreTableValidationError,
    load_fixture_table,
    load_table,
)

__all__ = [
    "FIXTURE_TABLE_PATH",
    "CurrentCharge",
    "DefendantRecord",
    "EventKind",
    "EventStreamError",
    "FactorPoints",
    "HistoryEvent",
    "RiskScores",
    "ScoreTable",
    "ScoreTableValidationError",
    "Severity",
    "derive_factors",
    "describe_scores",
    "load_fixture_table",
    "load_table",
    "parse_events",
    "parse_records",
    "raw_points",
    "read_events",
    "read_records",
    "score",
    "score_arrays",
]
