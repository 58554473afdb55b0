from __future__ import annotations

"""
单个被告的轨迹模拟。

simulate_trajectory 交替执行：
    X_i ~ Bernoulli(p_i)（sample_outcome，第 i 次抽样）
    p_{i+1} = step / biased_step
得到 p_1..p_N 与 X_1..X_{N-1}。给定 seed 逐位可复现；
cohort 引擎的向量化实现与这里逐位一致。
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Tuple

import yaml

from logger.logger import get_logger
from .bias import NO_BIAS, BiasSpec, biased_step
from .rng import SplitMix64
from .urn import DecisionOutcome, ProcessState, UrnParams, initial_state, step

logger = get_logger(__name__)


@dataclass(frozen=True)
class TrajectoryParams:
    urn: UrnParams = field(default_factory=UrnParams)
    bias: BiasSpec = NO_BIAS
    n_steps: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if isinstance(self.n_steps, bool) or int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError(f"TrajectoryParams.n_steps must be an integer >= 1, got {self.n_steps!r}")


@dataclass(frozen=True)
class Trajectory:
    probabilities: Tuple[float, ...]
    outcomes: Tuple[int, ...]
    out_of_regime_steps: int = 0

    def __post_init__(self) -> None:
        if len(self.outcomes) != len(self.probabilities) - 1:
            raise ValueError(
                f"Trajectory expects N-1 outcomes for N probabilities, "
                f"got {len(self.outcomes)} and {len(self.probabilities)}"
            )

    @property
    def n_steps(self) -> int:
        return len(self.probabilities)

    @property
    def endpoint(self) -> float:
        return self.probabilities[-1]

    @property
    def successes(self) -> int:
        return sum(self.outcomes)


def sample_outcome(p: float, rng: SplitMix64) -> DecisionOutcome:
    """
    以概率 p 返回 HIGH_RISK；消耗 rng 的一次抽样。
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"sample_outcome requires p in [0, 1], got {p!r}")
    u = rng.next_uniform()
    return DecisionOutcome.HIGH_RISK if u < p else DecisionOutcome.LOW_RISK


def simulate_trajectory(params: TrajectoryParams) -> Trajectory:
    rng = SplitMix64(params.seed)
    state: ProcessState = initial_state(params.urn)
    probabilities = [state.p]
    outcomes = []
    out_of_regime_steps = 0

    for _ in range(params.n_steps - 1):
        # 越界（仅 UNCLAMPED）时按截断后的概率抽样，记录值保持原样
        x = sample_outcome(min(1.0, max(0.0, state.p)), rng)
        if params.bias.is_unbiased:
            state = step(state, x, params.urn)
        else:
            state = biased_step(state, x, params.urn, params.bias)
            if state.out_of_regime:
                out_of_regime_steps += 1
        outcomes.append(int(x))
        probabilities.append(state.p)

    if out_of_regime_steps:
        logger.debug("trajectory_out_of_regime", seed=params.seed, steps=out_of_regime_steps)
    return Trajectory(
        probabilities=tuple(probabilities),
        outcomes=tuple(outcomes),
        out_of_regime_steps=out_of_regime_steps,
    )


# ---------------------------------------------------------------------- #
# 插图场景
# ---------------------------------------------------------------------- #

@dataclass(frozen=True)
class Preset:
    name: str
    urn: UrnParams
    bias: BiasSpec
    n_steps: int
    n_trajectories: int

    def to_document(self) -> Dict[str, Any]:
        """
        场景配置片段，键与 ScenarioConfig 一致。
        """
        return {
            "urn": {"b0": self.urn.b0, "r0": self.urn.r0, "k": self.urn.k},
            "bias": {
                "rho": self.bias.rho,
                "group_indicator": self.bias.group_indicator,
                "clamp": self.bias.clamp_policy.value,
            },
            "steps": self.n_steps,
            "trajectories": self.n_trajectories,
        }


def _load_presets() -> Dict[str, Preset]:
    project_root = Path(__file__).resolve().parents[1]
    sim_path = project_root / "config" / "simulation.yaml"
    with sim_path.open("r", encoding="utf-8") as f:
        cfg = yaml.safe_load(f)

    presets: Dict[str, Preset] = {}
    for name, p_cfg in (cfg.get("presets") or {}).items():
        bias_cfg = p_cfg.get("bias") or {}
        presets[name] = Preset(
            name=name,
            urn=UrnParams(**p_cfg.get("urn", {})),
            bias=BiasSpec(
                rho=float(bias_cfg.get("rho", 0.0)),
                group_indicator=int(bias_cfg.get("group_indicator", 0)),
                clamp_policy=bias_cfg.get("clamp", "clamp_unit_interval"),
            ),
            n_steps=int(p_cfg["steps"]),
            n_trajectories=int(p_cfg["trajectories"]),
        )
    return presets


ILLUSTRATION_PRESETS: Dict[str, Preset] = _load_presets()


__all__ = [
    "ILLUSTRATION_PRESETS",
    "Preset",
    "Trajectory",
    "TrajectoryParams",
    "sample_outcome",
    "simulate_trajectory",
]
