from __future__ import annotations

"""
顺序风险评估递推（无偏）与 Pólya 罐模型。

记号：
- 罐初始质量 b0（"蓝"）、r0（"红"），每次决策加入 k；n_j = b0 + r0 + j·k；
- p_i 为第 i 次决策被判高风险的概率，p_1 = b0 / (b0 + r0)；
- 递推：p_{i+1} = p_i·γ_{i+1} + X_i·(1 − γ_{i+1})，γ_i = n_{i-2} / (n_{i-2} + k)；
  b0 = r0 = k = 1 时 γ_i = i / (i + 1)。

质量允许非整数（k = 0.1 等），全部用实数表示。
"""

import math
from dataclasses import dataclass, replace
from enum import IntEnum
from fractions import Fraction
from pathlib import Path
from typing import Callable, List, Sequence, Union

import yaml

from logger.logger import get_logger

logger = get_logger(__name__)


def _load_rules() -> dict:
    project_root = Path(__file__).resolve().parents[1]
    rules_path = project_root / "config" / "rules.yaml"
    with rules_path.open("r", encoding="utf-8") as f:
        return yaml.safe_load(f).get("process", {})


_RULES = _load_rules()
ENUMERATION_CAP: int = int(_RULES.get("enumeration_cap", 25))


class DecisionOutcome(IntEnum):
    LOW_RISK = 0
    HIGH_RISK = 1


OutcomeLike = Union[DecisionOutcome, int]


def as_outcome(value: OutcomeLike) -> DecisionOutcome:
    if isinstance(value, bool) or value not in (0, 1):
        raise ValueError(f"decision outcome must be 0 or 1, got {value!r}")
    return DecisionOutcome(int(value))


@dataclass(frozen=True)
class UrnParams:
    b0: float = 1.0
    r0: float = 1.0
    k: float = 1.0

    def __post_init__(self) -> None:
        for name in ("b0", "r0", "k"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise ValueError(f"UrnParams.{name} must be a finite positive real, got {value!r}")

    @property
    def p1(self) -> float:
        return self.b0 / (self.b0 + self.r0)

    def mass_after(self, decisions: int) -> float:
        """n_j：j 次决策之后的罐内总质量。"""
        return self.b0 + self.r0 + decisions * self.k


@dataclass(frozen=True)
class ProcessState:
    """
    决策 i 之前的状态：p = p_i，total_mass = n_{i-1}。

    out_of_regime 一旦置位不再清除（有偏递推在 ρ > 1 − γ 时越界）。
    """

    step_index: int
    p: float
    successes: int
    total_mass: float
    out_of_regime: bool = False

    def __post_init__(self) -> None:
        if self.step_index < 1:
            raise ValueError(f"ProcessState.step_index must be >= 1, got {self.step_index}")
        if self.successes < 0 or self.successes > self.step_index - 1:
            raise ValueError(
                f"ProcessState.successes must be in [0, {self.step_index - 1}], got {self.successes}"
            )
        if self.total_mass <= 0:
            raise ValueError(f"ProcessState.total_mass must be > 0, got {self.total_mass}")
        if not self.out_of_regime and not (0.0 <= self.p <= 1.0):
            raise ValueError(f"ProcessState.p must be in [0, 1], got {self.p}")


def initial_state(urn: UrnParams) -> ProcessState:
    return ProcessState(step_index=1, p=urn.p1, successes=0, total_mass=urn.mass_after(0))


# ---------------------------------------------------------------------- #
# γ 权重
# ---------------------------------------------------------------------- #

def gamma_at(urn: UrnParams, i: int) -> float:
    """
    γ_i = n_{i-2} / (n_{i-2} + k)，i ∈ {2, …, N}。
    """
    if i < 2:
        raise ValueError(f"gamma_at requires i >= 2, got {i}")
    n = urn.mass_after(i - 2)
    return n / (n + urn.k)


def harmonic_gamma(i: int) -> float:
    """原始递推的权重 γ_i = i / (i + 1)。"""
    if i < 2:
        raise ValueError(f"harmonic_gamma requires i >= 2, got {i}")
    return i / (i + 1)


# ---------------------------------------------------------------------- #
# 递推
# ---------------------------------------------------------------------- #

def step(state: ProcessState, outcome: OutcomeLike, urn: UrnParams) -> ProcessState:
    """
    p_{i+1} = p_i·γ_{i+1} + X_i·(1 − γ_{i+1})。
    """
    x = as_outcome(outcome)
    gamma = gamma_at(urn, state.step_index + 1)
    new_p = state.p * gamma + x * (1.0 - gamma)
    return replace(
        state,
        step_index=state.step_index + 1,
        p=new_p,
        successes=state.successes + int(x),
        total_mass=state.total_mass + urn.k,
    )


def iterate_recurrence(
    p1: float, outcomes: Sequence[OutcomeLike], gamma_fn: Callable[[int], float]
) -> List[float]:
    """
    对给定结果序列反复应用 p_i = p_{i-1}·γ_i + X_{i-1}·(1 − γ_i)，返回 p_1..p_N。
    """
    path = [p1]
    p = p1
    for i, outcome in enumerate(outcomes, start=2):
        gamma = gamma_fn(i)
        p = p * gamma + as_outcome(outcome) * (1.0 - gamma)
        path.append(p)
    return path


def closed_form_p(urn: UrnParams, successes: int, decisions: int) -> float:
    """
    O(1) 计数公式：(b0 + k·s) / (b0 + r0 + k·d)。
    """
    if decisions < 0 or successes < 0:
        raise ValueError(f"successes and decisions must be >= 0, got {successes}, {decisions}")
    if successes > decisions:
        raise ValueError(f"successes ({successes}) cannot exceed decisions ({decisions})")
    return (urn.b0 + urn.k * successes) / urn.mass_after(decisions)


def sequence_probability(
    urn: UrnParams, outcomes: Sequence[OutcomeLike], exact: bool = False
) -> Union[float, Fraction]:
    """
    结果序列的概率 = 各条件概率之积；只依赖 (长度, 成功数)。

    exact=True 时用 Fraction 精确计算（浮点参数按其二进制值精确转换）。
    """
    if len(outcomes) > ENUMERATION_CAP:
        raise ValueError(
            f"sequence length {len(outcomes)} exceeds enumeration cap {ENUMERATION_CAP}"
        )
    if exact:
        b0, r0, k = Fraction(urn.b0), Fraction(urn.r0), Fraction(urn.k)
        prob: Union[float, Fraction] = Fraction(1)
    else:
        b0, r0, k = urn.b0, urn.r0, urn.k
        prob = 1.0

    successes = 0
    for decisions, outcome in enumerate(outcomes):
        x = as_outcome(outcome)
        p_high = (b0 + k * successes) / (b0 + r0 + k * decisions)
        prob *= p_high if x else (1 - p_high)
        successes += int(x)
    return prob


__all__ = [
    "ENUMERATION_CAP",
    "DecisionOutcome",
    "ProcessState",
    "UrnParams",
    "as_outcome",
    "closed_form_p",
    "gamma_at",
    "harmonic_gamma",
    "initial_state",
    "iterate_recurrence",
    "sequence_probability",
    "step",
]
