from __future__ import annotations

"""
九因子 → FTA / NCA / NVCA 三个分数。

每个输出：原始分 = Σ 因子分值；分数 = range.min + #{切分点 <= 原始分}。
纯函数，无副作用；表只接受经过 load_table 校验的实例。
"""

from dataclasses import asdict, dataclass
from typing import Dict, Mapping, Sequence

import numpy as np

from logger.logger import get_logger
from .factors import DefendantRecord
from .table import ScoreTable

logger = get_logger(__name__)


@dataclass(frozen=True)
class RiskScores:
    fta: int
    nca: int
    nvca: int

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


def raw_points(record: DefendantRecord, table: ScoreTable) -> Dict[str, float]:
    totals: Dict[str, float] = {}
    for output in table.outputs:
        total = 0.0
        for factor, spec in table.points[output].items():
            total += spec.points_for(getattr(record, factor))
        totals[output] = total
    return totals


def score(record: DefendantRecord, table: ScoreTable) -> RiskScores:
    if not isinstance(table, ScoreTable) or not table.validated:
        raise ValueError("score() requires a table returned by load_table()")
    if not isinstance(record, DefendantRecord):
        raise ValueError(f"score() requires a DefendantRecord, got {type(record).__name__}")

    totals = raw_points(record, table)
    values: Dict[str, int] = {}
    for output, raw in totals.items():
        low, high = table.ranges[output]
        value = low + sum(1 for cut in table.cutpoints[output] if cut <= raw)
        values[output] = min(high, value)
    return RiskScores(fta=values["fta"], nca=values["nca"], nvca=values["nvca"])


def score_arrays(factors: Mapping[str, np.ndarray], table: ScoreTable) -> Dict[str, np.ndarray]:
    """
    score 的向量化版本：factors 为九个因子各自的数组（等长），逐元素结果与 score 一致。
    """
    if not isinstance(table, ScoreTable) or not table.validated:
        raise ValueError("score_arrays() requires a table returned by load_table()")
    missing = [f for f in DefendantRecord.__dataclass_fields__ if f not in factors]
    if missing:
        raise ValueError(f"score_arrays() is missing factor arrays: {missing}")

    scores: Dict[str, np.ndarray] = {}
    for output in table.outputs:
        raw = None
        for factor, spec in table.points[output].items():
            values = np.asarray(factors[factor])
            if spec.kind == "BOOLEAN":
                contrib = np.where(values.astype(bool), spec.values[1], spec.values[0])
            elif spec.kind == "COUNT":
                lookup = np.asarray(spec.values, dtype=np.float64)
                contrib = lookup[np.minimum(values.astype(np.int64), lookup.size - 1)]
            else:
                conditions = [
                    np.ones(values.shape, dtype=bool) if upper is None else values <= upper
                    for upper, _ in spec.bands
                ]
                contrib = np.select(conditions, [pts for _, pts in spec.bands], default=np.nan)
            raw = contrib.astype(np.float64) if raw is None else raw + contrib
        if raw is None:
            raw = np.zeros(len(next(iter(factors.values()))), dtype=np.float64)
        low, high = table.ranges[output]
        cuts = np.asarray(table.cutpoints[output], dtype=np.float64)
        scores[output] = np.minimum(high, low + np.searchsorted(cuts, raw, side="right")).astype(np.int64)
    return scores


def describe_scores(scores: Sequence[RiskScores]) -> Dict[str, Dict[str, float]]:
    """
    批量分数的描述统计（count / mean / std / min / 25% / 50% / 75% / max）。
    """
    if not scores:
        raise ValueError("describe_scores requires at least one RiskScores")
    summary: Dict[str, Dict[str, float]] = {}
    for output in ("fta", "nca", "nvca"):
        values = np.array([getattr(s, output) for s in scores], dtype=np.float64)
        q25, q50, q75 = np.percentile(values, [25, 50, 75])
        summary[output] = {
            "count": float(values.size),
            "mean": float(values.mean()),
            "std": float(values.std(ddof=1)) if values.size > 1 else 0.0,
            "min": float(values.min()),
            "25%": float(q25),
            "50%": float(q50),
            "75%": float(q75),
            "max": float(values.max()),
        }
    logger.debug("describe_scores", count=len(scores))
    return summary


__all__ = ["RiskScores", "describe_scores", "raw_points", "score", "score_arrays"]
