# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：__init__.py
@Description：长期行为验证：Beta 极限、KS 距离、样本矩、鞅检验
"""

from .beta import (
    BetaParams,
    beta_cdf,
    beta_density_curve,
    beta_moments,
    beta_pdf,
    limit_beta_params,
)
from .empirical import (
    EmpiricalDistribution,
    extreme_fractions,
    histogram,
    ks_statistic,
    ks_two_sample,
    sample_moments,
    uniform_cdf,
)
from .martingale import MartingaleCheck, expected_risk_path, martingale_check

__all__ = [
    "BetaParams",
    "EmpiricalDistribution",
    "MartingaleCheck",
    "beta_cdf",
    "beta_density_curve",
    "beta_moments",
    "beta_pdf",
    "expected_risk_path",
    "extreme_fractions",
    "histogram",
    "ks_statistic",
    "ks_two_sample",
    "limit_beta_params",
    "martingale_check",
    "sample_moments",
    "uniform_cdf",
]
