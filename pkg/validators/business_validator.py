from __future__ import annotations

"""
评分表业务规则校验。

在结构校验通过之后执行，约束来自 `config/data_schema.yaml`：
- 声明范围必须与 data_schema 中的 declared_ranges 一致（FTA、NCA ∈ [1, 6]，NVCA ∈ {0, 1}）；
- COUNT 因子的分值随计数单调不减；
- BANDS 因子的 max 严格升序，最后一档 max 为 null；
- 切分点严格升序，个数 = max − min。
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List

import yaml

from logger.logger import get_logger

logger = get_logger(__name__)


@dataclass
class BusinessValidationResult:
    ok: bool
    violations: List[str]

    def raise_if_failed(self) -> None:
        if not self.ok:
            raise ValueError("business validation failed: " + "; ".join(self.violations))


class ScoreTableBusinessValidator:
    def __init__(self) -> None:
        project_root = Path(__file__).resolve().parents[1]
        with (project_root / "config" / "data_schema.yaml").open("r", encoding="utf-8") as f:
            table_cfg = yaml.safe_load(f).get("score_table", {})

        self.declared_ranges: Dict[str, List[int]] = {
            name: list(bounds) for name, bounds in table_cfg.get("declared_ranges", {}).items()
        }
        self.factor_kinds: Dict[str, str] = dict(table_cfg.get("factors", {}))

    # ------------------------------------------------------------------ #
    # Public API
    # ------------------------------------------------------------------ #
    def validate(self, document: Dict[str, Any]) -> BusinessValidationResult:
        violations: List[str] = []

        for output, expected in self.declared_ranges.items():
            declared = list(document["ranges"][output])
            if declared != expected:
                violations.append(
                    f"ranges.{output}: declared {declared} conflicts with required {expected}"
                )

        for output, factors in document["points"].items():
            for factor, spec in factors.items():
                kind = self.factor_kinds[factor]
                path = f"points.{output}.{factor}"
                if kind == "COUNT":
                    self._check_count(path, spec, violations)
                elif kind == "BANDS":
                    self._check_bands(path, spec, violations)

        for output, cuts in document["cutpoints"].items():
            lo, hi = document["ranges"][output]
            if len(cuts) != hi - lo:
                violations.append(
                    f"cutpoints.{output}: expected {hi - lo} thresholds for range [{lo}, {hi}], got {len(cuts)}"
                )
            for idx in range(1, len(cuts)):
                if cuts[idx] <= cuts[idx - 1]:
                    violations.append(
                        f"cutpoints.{output}: thresholds must strictly increase, "
                        f"{cuts[idx - 1]} then {cuts[idx]} at position {idx}"
                    )

        ok = not violations
        if ok:
            logger.debug("score_table_business_ok", name=document.get("name"))
        else:
            logger.warning(
                "score_table_business_invalid",
                name=document.get("name"),
                violations=len(violations),
                first=violations[0],
            )
        return BusinessValidationResult(ok=ok, violations=violations)

    # ------------------------------------------------------------------ #
    # Internal helpers
    # ------------------------------------------------------------------ #
    @staticmethod
    def _check_count(path: str, points: List[float], violations: List[str]) -> None:
        for count in range(1, len(points)):
            if points[count] < points[count - 1]:
                violations.append(
                    f"{path}: points decrease at count {count} "
                    f"({points[count - 1]} -> {points[count]})"
                )

    @staticmethod
    def _check_bands(path: str, bands: List[Dict[str, Any]], violations: List[str]) -> None:
        maxima = [band["max"] for band in bands]
        if maxima[-1] is not None:
            violations.append(f"{path}: last band must have max = null")
        bounded = maxima[:-1]
        if any(m is None for m in bounded):
            violations.append(f"{path}: only the last band may have max = null")
            return
        for idx in range(1, len(bounded)):
            if bounded[idx] <= bounded[idx - 1]:
                violations.append(f"{path}: band maxima must strictly increase at band {idx}")


__all__ = ["BusinessValidationResult", "ScoreTableBusinessValidator"]
