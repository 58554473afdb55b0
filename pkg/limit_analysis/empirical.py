from __future__ import annotations

"""
终点经验分布：KS 距离、样本矩、直方图、极端质量。

KS 只作描述性距离（与冻结阈值比较），不计算 p 值。
"""

from dataclasses import dataclass
from typing import Callable, Iterable, List, Tuple

import numpy as np

from logger.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class EmpiricalDistribution:
    samples: np.ndarray
    count: int

    @classmethod
    def from_samples(cls, values: Iterable[float]) -> "EmpiricalDistribution":
        if not isinstance(values, np.ndarray):
            values = list(values)
        arr = np.sort(np.array(values, dtype=np.float64))
        if arr.ndim != 1:
            raise ValueError(f"samples must be one-dimensional, got shape {arr.shape}")
        if arr.size and (not np.all(np.isfinite(arr)) or arr[0] < 0.0 or arr[-1] > 1.0):
            raise ValueError(
                f"samples must lie in [0, 1], got range [{arr[0]!r}, {arr[-1]!r}]"
            )
        arr.setflags(write=False)
        return cls(samples=arr, count=int(arr.size))


def _require_samples(dist: EmpiricalDistribution, minimum: int = 1) -> None:
    if dist.count < minimum:
        raise ValueError(f"need at least {minimum} sample(s), got {dist.count}")


def uniform_cdf(x: float) -> float:
    return min(1.0, max(0.0, x))


def ks_statistic(dist: EmpiricalDistribution, cdf: Callable[[float], float]) -> float:
    """
    单样本双侧 KS：D = max_i max(i/n − F(x_i), F(x_i) − (i−1)/n)。
    """
    _require_samples(dist)
    n = dist.count
    f = np.fromiter((cdf(float(v)) for v in dist.samples), dtype=np.float64, count=n)
    ranks = np.arange(1, n + 1, dtype=np.float64)
    d_plus = np.max(ranks / n - f)
    d_minus = np.max(f - (ranks - 1.0) / n)
    return float(max(d_plus, d_minus))


def ks_two_sample(first: EmpiricalDistribution, second: EmpiricalDistribution) -> float:
    """
    两样本 KS：两条经验 CDF 在合并样本点上的最大差。
    """
    _require_samples(first)
    _require_samples(second)
    grid = np.concatenate([first.samples, second.samples])
    cdf_1 = np.searchsorted(first.samples, grid, side="right") / first.count
    cdf_2 = np.searchsorted(second.samples, grid, side="right") / second.count
    return float(np.max(np.abs(cdf_1 - cdf_2)))


def sample_moments(dist: EmpiricalDistribution) -> Tuple[float, float]:
    """
    算术平均与无偏样本方差；count < 2 时方差无定义。
    """
    _require_samples(dist, minimum=2)
    return float(np.mean(dist.samples)), float(np.var(dist.samples, ddof=1))


def histogram(dist: EmpiricalDistribution, bins: int) -> Tuple[List[float], List[float]]:
    """
    [0, 1] 上等宽直方图，返回 (边界, 质量)，质量之和为 1。
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    _require_samples(dist)
    counts, edges = np.histogram(dist.samples, bins=bins, range=(0.0, 1.0))
    return edges.tolist(), (counts / dist.count).tolist()


def extreme_fractions(dist: EmpiricalDistribution, epsilon: float) -> Tuple[float, float]:
    """
    (p < ε 的占比, p > 1 − ε 的占比)。
    """
    if not (0.0 < epsilon < 0.5):
        raise ValueError(f"epsilon must be in (0, 0.5), got {epsilon!r}")
    _require_samples(dist)
    lower = np.searchsorted(dist.samples, epsilon, side="left") / dist.count
    upper = (dist.count - np.searchsorted(dist.samples, 1.0 - epsilon, side="right")) / dist.count
    return float(lower), float(upper)


__all__ = [
    "EmpiricalDistribution",
    "extreme_fractions",
    "histogram",
    "ks_statistic",
    "ks_two_sample",
    "sample_moments",
    "uniform_cdf",
]
