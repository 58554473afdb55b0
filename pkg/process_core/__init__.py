# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：__init__.py
@Description：顺序决策递推、Pólya 罐与轨迹模拟
"""

from .bias import NO_BIAS, BiasSpec, ClampPolicy, biased_step
from .rng import SplitMix64, derive_seed, derive_seeds, splitmix64_uniforms
from .trajectory import (
    ILLUSTRATION_PRESETS,
    Preset,
    Trajectory,
    TrajectoryParams,
    sample_outcome,
    simulate_trajectory,
)
from .urn import (
    DecisionOutcome,
    ProcessState,
    UrnParams,
    closed_form_p,
    gamma_at,
    harmonic_gamma,
    initial_state,
    iterate_recurrence,
    sequence_probability,
    step,
)

__all__ = [
    "NO_BIAS",
    "ILLUSTRATION_PRESETS",
    "BiasSpec",
    "ClampPolicy",
    "DecisionOutcome",
    "Preset",
    "ProcessState",
    "SplitMix64",
    "Trajectory",
    "TrajectoryParams",
    "UrnParams",
    "biased_step",
    "closed_form_p",
    "derive_seed",
    "derive_seeds",
    "gamma_at",
    "harmonic_gamma",
    "initial_state",
    "iterate_recurrence",
    "sample_outcome",
    "sequence_probability",
    "simulate_trajectory",
    "splitmix64_uniforms",
    "step",
]
