from __future__ import annotations

"""
极限律验收检查。

把 analyze 报告中的经验量与 `config/rules.yaml` 中 limits 段的冻结阈值比较：
  - KS 距离（对 Beta 极限）；
  - 鞅 z 分数；
  - 终点方差相对 Beta 闭式方差的偏差；
  - 极端质量与 beta_cdf oracle 的绝对偏差。
缺失的量跳过，不视为失败。
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import yaml

from logger.logger import get_logger

logger = get_logger(__name__)


@dataclass
class LimitInput:
    ks_distance: Optional[float] = None
    martingale_z: Optional[float] = None
    sample_variance: Optional[float] = None
    limit_variance: Optional[float] = None
    extreme_mass: Optional[float] = None
    extreme_mass_oracle: Optional[float] = None


@dataclass
class LimitCheckResult:
    ok: bool
    checks: Dict[str, bool] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)


class LimitChecker:
    def __init__(self) -> None:
        project_root = Path(__file__).resolve().parents[1]
        with (project_root / "config" / "rules.yaml").open("r", encoding="utf-8") as f:
            limits = yaml.safe_load(f).get("limits", {})

        self.ks_distance_max: float = float(limits.get("ks_distance_max", 0.02))
        self.martingale_z_max: float = float(limits.get("martingale_z_max", 4.0))
        self.variance_rel_tol: float = float(limits.get("variance_rel_tol", 0.15))
        self.extreme_mass_abs_tol: float = float(limits.get("extreme_mass_abs_tol", 0.02))

    # ------------------------------------------------------------------ #
    # Public API
    # ------------------------------------------------------------------ #
    def evaluate(self, inputs: LimitInput) -> LimitCheckResult:
        checks: Dict[str, bool] = {}
        failures: List[str] = []

        if inputs.ks_distance is not None:
            checks["ks_distance"] = inputs.ks_distance < self.ks_distance_max
            if not checks["ks_distance"]:
                failures.append(
                    f"ks_distance={inputs.ks_distance:.6f} >= {self.ks_distance_max}"
                )

        if inputs.martingale_z is not None:
            checks["martingale_z"] = abs(inputs.martingale_z) < self.martingale_z_max
            if not checks["martingale_z"]:
                failures.append(f"|z|={abs(inputs.martingale_z):.3f} >= {self.martingale_z_max}")

        if inputs.sample_variance is not None and inputs.limit_variance:
            rel = abs(inputs.sample_variance - inputs.limit_variance) / inputs.limit_variance
            checks["variance"] = rel <= self.variance_rel_tol
            if not checks["variance"]:
                failures.append(f"variance relative error {rel:.4f} > {self.variance_rel_tol}")

        if inputs.extreme_mass is not None and inputs.extreme_mass_oracle is not None:
            diff = abs(inputs.extreme_mass - inputs.extreme_mass_oracle)
            checks["extreme_mass"] = diff <= self.extreme_mass_abs_tol
            if not checks["extreme_mass"]:
                failures.append(f"extreme mass off by {diff:.4f} > {self.extreme_mass_abs_tol}")

        ok = not failures
        logger.debug("limit_check", ok=ok, checks=checks)
        return LimitCheckResult(ok=ok, checks=checks, failures=failures)


__all__ = ["LimitCheckResult", "LimitChecker", "LimitInput"]
