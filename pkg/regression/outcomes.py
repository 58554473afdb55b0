from __future__ import annotations

"""
由决策轨迹得到累计结果（例如累计监禁天数）。

每次高风险决策 X_i = 1 贡献 days_per_high_risk，只统计窗口内（前 window 次决策）的决策；
window 为 None 时统计全部决策。
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from cohort.engine import GroupResult
from process_core.trajectory import Trajectory

OutcomeSource = Union[Sequence[Trajectory], np.ndarray, GroupResult]


@dataclass(frozen=True)
class SentenceRule:
    days_per_high_risk: float = 1.0
    window: Optional[int] = None

    def __post_init__(self) -> None:
        if self.days_per_high_risk < 0.0:
            raise ValueError(f"SentenceRule.days_per_high_risk must be >= 0, got {self.days_per_high_risk!r}")
        if self.window is not None and self.window < 0:
            raise ValueError(f"SentenceRule.window must be >= 0, got {self.window!r}")


def _outcome_matrix(source: OutcomeSource) -> Optional[np.ndarray]:
    if isinstance(source, GroupResult):
        return source.outcomes
    if isinstance(source, np.ndarray):
        if source.ndim != 2:
            raise ValueError(f"outcome matrix must be two-dimensional, got shape {source.shape}")
        return source
    rows = [t.outcomes for t in source]
    if not rows:
        return np.zeros((0, 0), dtype=np.int8)
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("all trajectories must have the same number of decisions")
    return np.array(rows, dtype=np.int8).reshape(len(rows), width)


def cumulative_outcome_from_trajectories(source: OutcomeSource, rule: SentenceRule) -> np.ndarray:
    outcomes = _outcome_matrix(source)
    if outcomes is None:
        # 未记录完整路径的 cohort 只能使用全窗口成功次数
        if rule.window is not None:
            raise ValueError("a decision window requires recorded outcomes; rerun with record_full_paths=True")
        counts = source.successes.astype(np.float64)
    else:
        window = outcomes if rule.window is None else outcomes[:, : rule.window]
        counts = window.sum(axis=1, dtype=np.int64).astype(np.float64)
    return counts * rule.days_per_high_risk


__all__ = ["SentenceRule", "cumulative_outcome_from_trajectories"]
