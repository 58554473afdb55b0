from __future__ import annotations

"""
CLI 场景配置与运行清单（RunManifest）的 pydantic schema。

所有配置模型都禁止未知字段（extra="forbid"），校验错误带完整 key path。
"""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from process_core.bias import ClampPolicy

MAX_SEED = (1 << 64) - 1


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class UrnConfig(_StrictModel):
    b0: float = Field(default=1.0, gt=0, description="初始蓝球（高风险）质量")
    r0: float = Field(default=1.0, gt=0, description="初始红球（低风险）质量")
    k: float = Field(default=1.0, gt=0, description="每次决策加入的同色质量")


class BiasConfig(_StrictModel):
    rho: float = Field(default=0.0, ge=0.0, lt=1.0, description="每步偏置权重")
    group_indicator: Literal[0, 1] = Field(default=0, description="R：1 表示受偏置影响的组")
    clamp: ClampPolicy = ClampPolicy.CLAMP_UNIT_INTERVAL


class GroupConfig(_StrictModel):
    name: str = Field(..., min_length=1)
    size: int = Field(..., ge=1)
    urn: UrnConfig = Field(default_factory=UrnConfig)
    bias: BiasConfig = Field(default_factory=BiasConfig)


class OutputConfig(_StrictModel):
    format: Literal["csv", "json"] = "csv"
    path: Optional[str] = None
    hist_bins: int = Field(default=20, ge=1)
    epsilon: float = Field(default=0.05, gt=0.0, lt=0.5)
    checkpoints: int = Field(default=32, ge=2, description="几何检查点网格的点数")
    checkpoint_steps: Optional[List[int]] = Field(default=None, description="显式检查点，优先于网格")
    record_full_paths: bool = False


class ScenarioConfig(_StrictModel):
    urn: UrnConfig = Field(default_factory=UrnConfig)
    bias: BiasConfig = Field(default_factory=BiasConfig)
    steps: int = Field(default=10, ge=1)
    trajectories: int = Field(default=5, ge=1)
    groups: List[GroupConfig] = Field(default_factory=list)
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def _check_groups(self) -> "ScenarioConfig":
        names = [g.name for g in self.groups]
        if len(set(names)) != len(names):
            raise ValueError(f"group names must be unique, got {names}")
        steps = self.output.checkpoint_steps or []
        bad = [c for c in steps if c < 1 or c > self.steps]
        if bad:
            raise ValueError(f"output.checkpoint_steps must lie in [1, {self.steps}], got {bad}")
        return self


class RunManifest(BaseModel):
    tool: str = "rdl"
    version: str
    command: str
    run_id: str
    timestamp: str
    master_seed: int
    config: ScenarioConfig
    seed_derivations: Dict[str, Any] = Field(default_factory=dict)
    parameters: Dict[str, Any] = Field(default_factory=dict)
    outputs: List[str] = Field(default_factory=list)


__all__ = [
    "MAX_SEED",
    "BiasConfig",
    "GroupConfig",
    "OutputConfig",
    "RunManifest",
    "ScenarioConfig",
    "UrnConfig",
]
