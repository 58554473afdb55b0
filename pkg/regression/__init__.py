# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：__init__.py
@Description：OLS（列主元 QR）、合成犯因性 cohort 与结果报表
"""

from .ols import (
    INTERCEPT,
    DesignMatrix,
    RankDeficiencyError,
    RegressionResult,
    ols_fit,
    significance_stars,
)
from .outcomes import SentenceRule, cumulative_outcome_from_trajectories
from .report import (
    describe_design,
    format_describe,
    format_table,
    read_design_csv,
    result_to_json,
    write_design_csv,
)
from .synth import (
    CoverageReport,
    CovariateSpec,
    SynthCohortSpec,
    available_scenarios,
    calibrate_noise_sd,
    coverage_run,
    generate_synth_cohort,
    scenario_from_config,
)

__all__ = [
    "INTERCEPT",
    "CoverageReport",
    "CovariateSpec",
    "DesignMatrix",
    "RankDeficiencyError",
    "RegressionResult",
    "SentenceRule",
    "SynthCohortSpec",
    "available_scenarios",
    "calibrate_noise_sd",
    "coverage_run",
    "cumulative_outcome_from_trajectories",
    "describe_design",
    "format_describe",
    "format_table",
    "generate_synth_cohort",
    "ols_fit",
    "read_design_csv",
    "result_to_json",
    "scenario_from_config",
    "significance_stars",
    "write_design_csv",
]
