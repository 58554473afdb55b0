from __future__ import annotations

"""
Beta 极限律。

罐过程 p_i 几乎必然收敛到 P ~ Beta(b0/k, r0/k)。这里提供：
- limit_beta_params：由罐参数得到 (a, b)；
- beta_cdf：正则化不完全 Beta 函数 I_x(a, b)，连分式（修正 Lentz）求值，
  x > (a+1)/(a+b+2) 时用 I_x(a,b) = 1 − I_{1−x}(b,a) 切换；
- beta_pdf / beta_moments：密度曲线与闭式矩，供报告与验收使用。
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

import yaml
from scipy.special import betaln

from logger.logger import get_logger
from process_core.urn import UrnParams

logger = get_logger(__name__)


def _load_rules() -> dict:
    project_root = Path(__file__).resolve().parents[1]
    rules_path = project_root / "config" / "rules.yaml"
    with rules_path.open("r", encoding="utf-8") as f:
        return yaml.safe_load(f).get("beta", {})


_RULES = _load_rules()
CF_TOLERANCE: float = float(_RULES.get("tolerance", 1e-15))
CF_MAX_ITERATIONS: int = int(_RULES.get("max_iterations", 10000))
_FPMIN = 1e-300


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0) or not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"BetaParams requires a > 0 and b > 0, got ({self.a!r}, {self.b!r})")


def limit_beta_params(urn: UrnParams) -> BetaParams:
    return BetaParams(a=urn.b0 / urn.k, b=urn.r0 / urn.k)


def beta_moments(params: BetaParams) -> Tuple[float, float]:
    """闭式均值与方差：a/(a+b)，ab/((a+b)²(a+b+1))。"""
    a, b = params.a, params.b
    s = a + b
    return a / s, a * b / (s * s * (s + 1.0))


def _continued_fraction(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d

    for m in range(1, CF_MAX_ITERATIONS + 1):
        m2 = 2 * m
        # 偶数项
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        # 奇数项
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= CF_TOLERANCE:
            return h

    logger.error("beta_cf_not_converged", a=a, b=b, x=x, max_iterations=CF_MAX_ITERATIONS)
    raise ArithmeticError(
        f"incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}"
    )


def _log_front(a: float, b: float, x: float) -> float:
    return a * math.log(x) + b * math.log1p(-x) - float(betaln(a, b))


def beta_cdf(params: BetaParams, x: float) -> float:
    """
    I_x(a, b)，绝对误差 ≤ 1e-10。
    """
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"beta_cdf requires x in [0, 1], got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0

    a, b = params.a, params.b
    front = math.exp(_log_front(a, b, x))
    if x < (a + 1.0) / (a + b + 2.0):
        value = front * _continued_fraction(a, b, x) / a
    else:
        value = 1.0 - front * _continued_fraction(b, a, 1.0 - x) / b
    return min(1.0, max(0.0, value))


def beta_pdf(params: BetaParams, x: float) -> float:
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"beta_pdf requires x in [0, 1], got {x!r}")
    a, b = params.a, params.b
    if x == 0.0:
        return math.inf if a < 1.0 else (1.0 / math.exp(float(betaln(a, b))) if a == 1.0 else 0.0)
    if x == 1.0:
        return math.inf if b < 1.0 else (1.0 / math.exp(float(betaln(a, b))) if b == 1.0 else 0.0)
    return math.exp((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - float(betaln(a, b)))


def beta_density_curve(params: BetaParams, points: int = 101) -> List[Tuple[float, float]]:
    """
    等距内点上的密度 (x, f(x))，端点避开（a 或 b < 1 时发散）。
    """
    if points < 2:
        raise ValueError(f"points must be >= 2, got {points}")
    xs = [(i + 0.5) / points for i in range(points)]
    return [(x, beta_pdf(params, x)) for x in xs]


__all__ = [
    "BetaParams",
    "beta_cdf",
    "beta_density_curve",
    "beta_moments",
    "beta_pdf",
    "limit_beta_params",
]
