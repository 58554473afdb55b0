from __future__ import annotations

"""
有偏递推：每一步都加入组别偏置 ρ。

    p_{i+1} = p_i·γ + R·ρ + X_i·(1 − γ − ρ)

实现时写成 p·γ + (X·(1 − γ) + (R − X)·ρ)，与上式代数等价，且
ρ = 0 时与 step() 逐位相同、R = 1 且 X = 1 时 ρ 精确抵消。

ρ 固定而 γ_i → 1，因此 ρ ≤ 1 − γ_i 迟早不成立：
- CLAMP_UNIT_INTERVAL：每步把 p 截断到 [0, 1]（默认）；
- UNCLAMPED：保留原始值，并把状态标记为 out_of_regime。
"""

from dataclasses import dataclass, replace
from enum import Enum

from logger.logger import get_logger
from .urn import OutcomeLike, ProcessState, UrnParams, as_outcome, gamma_at

logger = get_logger(__name__)


class ClampPolicy(str, Enum):
    CLAMP_UNIT_INTERVAL = "clamp_unit_interval"
    UNCLAMPED = "unclamped"


@dataclass(frozen=True)
class BiasSpec:
    rho: float = 0.0
    group_indicator: int = 0
    clamp_policy: ClampPolicy = ClampPolicy.CLAMP_UNIT_INTERVAL

    def __post_init__(self) -> None:
        if not (0.0 <= self.rho < 1.0):
            raise ValueError(f"BiasSpec.rho must be in [0, 1), got {self.rho!r}")
        if isinstance(self.group_indicator, bool) or self.group_indicator not in (0, 1):
            raise ValueError(
                f"BiasSpec.group_indicator must be 0 or 1, got {self.group_indicator!r}"
            )
        # 允许以字符串传入
        object.__setattr__(self, "clamp_policy", ClampPolicy(self.clamp_policy))

    @property
    def is_unbiased(self) -> bool:
        return self.rho == 0.0


NO_BIAS = BiasSpec()


def biased_increment(x: float, gamma: float, bias: BiasSpec) -> float:
    return x * (1.0 - gamma) + (bias.group_indicator - x) * bias.rho


def clamp_unit(p: float) -> float:
    return min(1.0, max(0.0, p))


def biased_step(
    state: ProcessState, outcome: OutcomeLike, urn: UrnParams, bias: BiasSpec
) -> ProcessState:
    x = as_outcome(outcome)
    gamma = gamma_at(urn, state.step_index + 1)
    raw = state.p * gamma + biased_increment(int(x), gamma, bias)

    out_of_regime = state.out_of_regime
    if bias.clamp_policy is ClampPolicy.CLAMP_UNIT_INTERVAL:
        new_p = clamp_unit(raw)
    else:
        new_p = raw
        if 1.0 - gamma - bias.rho < 0.0 and not out_of_regime:
            out_of_regime = True
            logger.debug(
                "biased_step_out_of_regime",
                step_index=state.step_index + 1,
                gamma=gamma,
                rho=bias.rho,
            )

    return replace(
        state,
        step_index=state.step_index + 1,
        p=new_p,
        successes=state.successes + int(x),
        total_mass=state.total_mass + urn.k,
        out_of_regime=out_of_regime,
    )


__all__ = ["BiasSpec", "ClampPolicy", "NO_BIAS", "biased_increment", "biased_step", "clamp_unit"]
