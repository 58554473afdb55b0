from __future__ import annotations

"""
组间差异指标。

ρ = 0 时每组 p_i 为鞅，两组期望差在每个 i 上保持初始差；
这里报告的都是期望层面的量（均值、标准误、差值序列），外加终点的极端质量与直方图。
"""

import math
from dataclasses import asdict, dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import yaml

from cohort.engine import CohortResult
from limit_analysis.empirical import EmpiricalDistribution, extreme_fractions, histogram
from logger.logger import get_logger

logger = get_logger(__name__)


def _load_rules() -> dict:
    project_root = Path(__file__).resolve().parents[1]
    with (project_root / "config" / "rules.yaml").open("r", encoding="utf-8") as f:
        return yaml.safe_load(f).get("cohort", {})


_RULES = _load_rules()
DEFAULT_EPSILON: float = float(_RULES.get("epsilon", 0.05))
DEFAULT_HIST_BINS: int = int(_RULES.get("hist_bins", 20))


@dataclass(frozen=True)
class ExtremeMass:
    lower: float
    upper: float

    @property
    def total(self) -> float:
        return self.lower + self.upper


@dataclass
class DisparityReport:
    epsilon: float
    bins: int
    checkpoints: List[int]
    group_means: Dict[str, List[float]]
    group_se: Dict[str, List[float]]
    gaps: Dict[str, List[float]]
    gap_se: Dict[str, List[float]]
    extreme: Dict[str, ExtremeMass]
    histograms: Dict[str, Dict[str, List[float]]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["extreme"] = {
            name: {"lower": m.lower, "upper": m.upper, "total": m.total}
            for name, m in self.extreme.items()
        }
        return data


# ---------------------------------------------------------------------- #
# Public API
# ---------------------------------------------------------------------- #

def _check_epsilon(epsilon: float) -> None:
    if not (0.0 < epsilon < 0.5):
        raise ValueError(f"epsilon must be in (0, 0.5), got {epsilon!r}")


def _require_members(result: CohortResult) -> None:
    if not result.groups or any(g.endpoints.size == 0 for g in result.groups):
        raise ValueError("disparity metrics require a non-empty cohort result")


def extreme_mass(result: CohortResult, epsilon: float = DEFAULT_EPSILON) -> Dict[str, ExtremeMass]:
    """
    每组终点中 p_N < ε 与 p_N > 1 − ε 的占比。
    """
    _check_epsilon(epsilon)
    _require_members(result)
    masses: Dict[str, ExtremeMass] = {}
    for g in result.groups:
        # 未截断路径可能越出 [0, 1]，按截断值归入两端
        dist = EmpiricalDistribution.from_samples(np.clip(g.endpoints, 0.0, 1.0))
        lower, upper = extreme_fractions(dist, epsilon)
        masses[g.name] = ExtremeMass(lower=lower, upper=upper)
    return masses


def disparity_metrics(
    result: CohortResult,
    epsilon: float = DEFAULT_EPSILON,
    bins: int = DEFAULT_HIST_BINS,
) -> DisparityReport:
    _check_epsilon(epsilon)
    _require_members(result)
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")

    means: Dict[str, np.ndarray] = {}
    ses: Dict[str, np.ndarray] = {}
    for g in result.groups:
        cp = g.checkpoint_p
        means[g.name] = cp.mean(axis=0)
        if cp.shape[0] > 1:
            ses[g.name] = cp.std(axis=0, ddof=1) / math.sqrt(cp.shape[0])
        else:
            ses[g.name] = np.zeros(cp.shape[1])

    gaps: Dict[str, List[float]] = {}
    gap_se: Dict[str, List[float]] = {}
    for first, second in combinations([g.name for g in result.groups], 2):
        key = f"{first}-{second}"
        gaps[key] = (means[first] - means[second]).tolist()
        gap_se[key] = np.sqrt(ses[first] ** 2 + ses[second] ** 2).tolist()

    histograms: Dict[str, Dict[str, List[float]]] = {}
    for g in result.groups:
        dist = EmpiricalDistribution.from_samples(np.clip(g.endpoints, 0.0, 1.0))
        edges, masses = histogram(dist, bins)
        histograms[g.name] = {"edges": edges, "masses": masses}

    report = DisparityReport(
        epsilon=epsilon,
        bins=bins,
        checkpoints=[int(c) for c in result.checkpoints],
        group_means={k: v.tolist() for k, v in means.items()},
        group_se={k: v.tolist() for k, v in ses.items()},
        gaps=gaps,
        gap_se=gap_se,
        extreme=extreme_mass(result, epsilon),
        histograms=histograms,
    )
    logger.info(
        "disparity_metrics_done",
        groups=len(result.groups),
        pairs=len(gaps),
        checkpoints=len(report.checkpoints),
        epsilon=epsilon,
    )
    return report


def gap_within_tolerance(
    report: DisparityReport,
    pair: str,
    expected: float,
    n_se: float = 4.0,
    atol: float = 1e-12,
) -> List[bool]:
    """
    每个检查点上 |gap − expected| ≤ n_se · 合并标准误 + atol。

    atol 覆盖标准误为 0 的检查点（例如第 1 步，所有成员的 p 都等于 p_1）。
    """
    if pair not in report.gaps:
        raise KeyError(f"unknown group pair: {pair}; known pairs: {sorted(report.gaps)}")
    return [
        abs(gap - expected) <= n_se * se + atol
        for gap, se in zip(report.gaps[pair], report.gap_se[pair])
    ]


__all__ = [
    "DisparityReport",
    "ExtremeMass",
    "disparity_metrics",
    "extreme_mass",
    "gap_within_tolerance",
]
