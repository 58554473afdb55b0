from __future__ import annotations

"""
鞅性质检验与期望递推。

无偏时 E(p_{i+1} | 历史) = p_i，故 E(p_N) = p_1；
有偏（未截断）时 e_i = e_{i-1}·(1 − ρ) + R·ρ，与 γ 无关。
"""

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from logger.logger import get_logger
from process_core.bias import BiasSpec
from process_core.urn import UrnParams

logger = get_logger(__name__)


@dataclass(frozen=True)
class MartingaleCheck:
    mean: float
    se: float
    z: float
    m: int


def martingale_check(endpoints: Iterable[float], p1: float) -> MartingaleCheck:
    """
    z = (mean(p_N) − p_1) / (sd / √M)。

    0/0 记为 0；sd 为 0 而均值偏离时 z 为 ±inf。
    """
    if not isinstance(endpoints, np.ndarray):
        endpoints = list(endpoints)
    values = np.asarray(endpoints, dtype=np.float64)
    m = int(values.size)
    if m < 2:
        raise ValueError(f"martingale_check requires M >= 2 endpoints, got {m}")

    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1))
    se = sd / math.sqrt(m)
    deviation = mean - p1
    if se == 0.0:
        z = 0.0 if deviation == 0.0 else math.copysign(math.inf, deviation)
    else:
        z = deviation / se

    logger.debug("martingale_check", mean=mean, p1=p1, se=se, z=z, m=m)
    return MartingaleCheck(mean=mean, se=se, z=z, m=m)


def expected_risk_path(urn: UrnParams, bias: BiasSpec, n_steps: int) -> np.ndarray:
    """
    E(p_1..p_N)（未截断的解析递推）。
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    path = np.empty(n_steps, dtype=np.float64)
    e = urn.p1
    path[0] = e
    for i in range(1, n_steps):
        e = e * (1.0 - bias.rho) + bias.group_indicator * bias.rho
        path[i] = e
    return path


__all__ = ["MartingaleCheck", "expected_risk_path", "martingale_check"]
