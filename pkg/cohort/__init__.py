# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：__init__.py
@Description：多组 cohort 模拟（确定性并行）与组间差异指标
"""

from .disparity import (
    DisparityReport,
    ExtremeMass,
    disparity_metrics,
    extreme_mass,
    gap_within_tolerance,
)
from .engine import (
    CohortResult,
    CohortSpec,
    GroupResult,
    GroupSpec,
    checkpoint_grid,
    group_seed_derivations,
    run_cohort,
)

__all__ = [
    "CohortResult",
    "CohortSpec",
    "DisparityReport",
    "ExtremeMass",
    "GroupResult",
    "GroupSpec",
    "checkpoint_grid",
    "disparity_metrics",
    "extreme_mass",
    "gap_within_tolerance",
    "group_seed_derivations",
    "run_cohort",
]
