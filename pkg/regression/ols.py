from __future__ import annotations

"""
普通最小二乘（OLS）。

- 列主元 QR 分解求解，不显式构造 (XᵀX)⁻¹；
- |R_jj| <= tol · |R_00| 的列视为线性相关，以 RankDeficiencyError 报出列名；
- 同方差标准误：se = sqrt(s² · diag((RᵀR)⁻¹))，s² = RSS / (n − p)；
- n == p 时为精确插值，残差自由度为 0，标准误等统计量记为 NaN。
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
import yaml
from scipy import linalg, stats

from logger.logger import get_logger

logger = get_logger(__name__)


def _load_rules() -> dict:
    project_root = Path(__file__).resolve().parents[1]
    with (project_root / "config" / "rules.yaml").open("r", encoding="utf-8") as f:
        return yaml.safe_load(f).get("regression", {})


_RULES = _load_rules()
RANK_TOLERANCE: float = float(_RULES.get("rank_tolerance", 1e-10))
CONFIDENCE_LEVEL: float = float(_RULES.get("confidence_level", 0.95))

INTERCEPT = "intercept"


class RankDeficiencyError(ArithmeticError):
    def __init__(self, columns: Sequence[str], rank: int, n_columns: int) -> None:
        super().__init__(
            f"design matrix is rank deficient (rank {rank} < {n_columns} columns); "
            f"linearly dependent columns: {', '.join(columns)}"
        )
        self.columns = list(columns)
        self.rank = rank


@dataclass(frozen=True)
class DesignMatrix:
    columns: Tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(self.columns))
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"DesignMatrix.values must be two-dimensional, got shape {values.shape}")
        if values.shape[1] != len(self.columns):
            raise ValueError(
                f"DesignMatrix has {values.shape[1]} value columns but {len(self.columns)} names"
            )
        if len(set(self.columns)) != len(self.columns):
            dupes = sorted({c for c in self.columns if self.columns.count(c) > 1})
            raise ValueError(f"DesignMatrix column names must be unique, duplicated: {dupes}")
        if not len(self.columns):
            raise ValueError("DesignMatrix requires at least one column")
        if not np.all(np.isfinite(values)):
            raise ValueError("DesignMatrix values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_columns(cls, data: Mapping[str, Sequence[float]], intercept: bool = True) -> "DesignMatrix":
        names = list(data)
        arrays = [np.asarray(data[name], dtype=np.float64) for name in names]
        if intercept and INTERCEPT not in data:
            n = arrays[0].shape[0] if arrays else 0
            names.insert(0, INTERCEPT)
            arrays.insert(0, np.ones(n))
        return cls(columns=tuple(names), values=np.column_stack(arrays))

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def p(self) -> int:
        return int(self.values.shape[1])

    @property
    def has_intercept(self) -> bool:
        return bool(np.any(np.all(self.values == 1.0, axis=0)))

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]


@dataclass
class RegressionResult:
    columns: Tuple[str, ...]
    beta: np.ndarray
    se: np.ndarray
    t_stat: np.ndarray
    p_values: np.ndarray
    conf_low: np.ndarray
    conf_high: np.ndarray
    r_squared: float
    adj_r_squared: float
    f_stat: float
    sigma: float
    n: int
    dof: int
    confidence_level: float = CONFIDENCE_LEVEL
    residuals: Optional[np.ndarray] = field(default=None, repr=False)

    def coefficient(self, name: str) -> Tuple[float, float]:
        idx = self.columns.index(name)
        return float(self.beta[idx]), float(self.se[idx])

    def covers(self, name: str, value: float) -> bool:
        idx = self.columns.index(name)
        return bool(self.conf_low[idx] <= value <= self.conf_high[idx])

    def to_dict(self) -> Dict[str, object]:
        def _clean(v: float) -> Optional[float]:
            return None if not math.isfinite(v) else float(v)

        return {
            "coefficients": {
                name: {
                    "beta": _clean(self.beta[i]),
                    "se": _clean(self.se[i]),
                    "t": _clean(self.t_stat[i]),
                    "p_value": _clean(self.p_values[i]),
                    "conf_low": _clean(self.conf_low[i]),
                    "conf_high": _clean(self.conf_high[i]),
                }
                for i, name in enumerate(self.columns)
            },
            "r_squared": _clean(self.r_squared),
            "adj_r_squared": _clean(self.adj_r_squared),
            "f_stat": _clean(self.f_stat),
            "sigma": _clean(self.sigma),
            "n": self.n,
            "dof": self.dof,
            "confidence_level": self.confidence_level,
        }


# ---------------------------------------------------------------------- #
# Public API
# ---------------------------------------------------------------------- #

def ols_fit(
    x: DesignMatrix,
    y: Sequence[float],
    rank_tolerance: float = RANK_TOLERANCE,
    confidence_level: float = CONFIDENCE_LEVEL,
) -> RegressionResult:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.shape[0] != x.n:
        raise ValueError(f"outcome vector must have length {x.n}, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("outcome vector must be finite")
    n, p = x.n, x.p
    if n < p:
        raise ValueError(f"ols_fit requires n >= p, got n={n}, p={p}")

    q, r, piv = linalg.qr(x.values, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    scale = diag[0] if diag.size else 0.0
    rank = int(np.sum(diag > rank_tolerance * scale)) if scale > 0.0 else 0
    if rank < p:
        offending = [x.columns[j] for j in piv[rank:]]
        logger.error("ols_rank_deficient", rank=rank, p=p, columns=offending)
        raise RankDeficiencyError(offending, rank, p)

    beta_piv = linalg.solve_triangular(r, q.T @ y)
    beta = np.empty(p)
    beta[piv] = beta_piv

    fitted = x.values @ beta
    residuals = y - fitted
    rss = float(residuals @ residuals)
    dof = n - p

    r_inv = linalg.solve_triangular(r, np.eye(p))
    cov_diag = np.empty(p)
    cov_diag[piv] = np.sum(r_inv * r_inv, axis=1)

    has_intercept = x.has_intercept
    if has_intercept:
        tss = float(np.sum((y - y.mean()) ** 2))
    else:
        tss = float(y @ y)

    if tss > 0.0:
        r_squared = 1.0 - rss / tss
    else:
        r_squared = 1.0 if rss == 0.0 else 0.0
    if has_intercept:
        r_squared = min(1.0, max(0.0, r_squared))

    with np.errstate(divide="ignore", invalid="ignore"):
        if dof > 0:
            s2 = rss / dof
            se = np.sqrt(s2 * cov_diag)
            t_stat = np.where(se > 0.0, beta / se, np.copysign(np.inf, beta))
            p_values = 2.0 * stats.t.sf(np.abs(t_stat), dof)
            crit = float(stats.t.ppf(0.5 + confidence_level / 2.0, dof))
            conf_low, conf_high = beta - crit * se, beta + crit * se
            sigma = math.sqrt(s2)
            k = p - 1 if has_intercept else p
            adj = 1.0 - (1.0 - r_squared) * (n - 1 if has_intercept else n) / dof
            if k > 0 and rss > 0.0:
                f_stat = ((tss - rss) / k) / (rss / dof)
            elif k > 0:
                f_stat = math.inf
            else:
                f_stat = math.nan
        else:
            nan = np.full(p, np.nan)
            se, t_stat, p_values, conf_low, conf_high = nan, nan.copy(), nan.copy(), nan.copy(), nan.copy()
            sigma, adj, f_stat = math.nan, math.nan, math.nan
            logger.warning("ols_exact_fit", n=n, p=p)

    result = RegressionResult(
        columns=x.columns,
        beta=beta,
        se=se,
        t_stat=t_stat,
        p_values=p_values,
        conf_low=conf_low,
        conf_high=conf_high,
        r_squared=r_squared,
        adj_r_squared=adj,
        f_stat=f_stat,
        sigma=sigma,
        n=n,
        dof=dof,
        confidence_level=confidence_level,
        residuals=residuals,
    )
    logger.debug("ols_fit_done", n=n, p=p, r_squared=r_squared)
    return result


def significance_stars(p_value: float) -> str:
    """`* p<.1, ** p<.05, *** p<.01`"""
    if not math.isfinite(p_value):
        return ""
    if p_value < 0.01:
        return "***"
    if p_value < 0.05:
        return "**"
    if p_value < 0.1:
        return "*"
    return ""


__all__ = [
    "INTERCEPT",
    "DesignMatrix",
    "RankDeficiencyError",
    "RegressionResult",
    "ols_fit",
    "significance_stars",
]
