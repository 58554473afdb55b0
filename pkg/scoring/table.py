from __future__ import annotations

"""
评分表（ScoreTable）。

评分完全由表驱动，代码不内置任何真实 PSA 权重。文档格式见 `config/data_schema.yaml`：
    ranges:    {"fta": [1, 6], "nca": [1, 6], "nvca": [0, 1]}
    points:    {"fta": {factor: spec, ...}, ...}
    cutpoints: {"fta": [t1, ..., t5], ...}
load_table 依次做结构校验与业务校验，全部违规项汇总到 ScoreTableValidationError。
"""

import json
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Any, Dict, List, Mapping, Tuple, Union

from logger.logger import get_logger
from validators.business_validator import ScoreTableBusinessValidator
from validators.schema_validator import ScoreTableSchemaValidator

logger = get_logger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parents[1]
FIXTURE_TABLE_PATH = PROJECT_ROOT / "config" / "score_tables" / "synthetic_fixture.json"


class ScoreTableValidationError(ValueError):
    def __init__(self, violations: List[str]) -> None:
        super().__init__("score table validation failed: " + "; ".join(violations))
        self.violations = list(violations)


@dataclass(frozen=True)
class FactorPoints:
    """
    单个因子在某个输出上的分值。

    kind 为 BOOLEAN 时 values = (false 分, true 分)；
    COUNT 时 values[c] 为计数 c 的分值，超过末项按末项；
    BANDS 时 bands = ((max, points), ...)，取第一个 value <= max 的档，max 为 None 表示无上界。
    """

    kind: str
    values: Tuple[float, ...] = ()
    bands: Tuple[Tuple[Union[int, None], float], ...] = ()

    def points_for(self, value: Union[bool, int]) -> float:
        if self.kind == "BOOLEAN":
            return self.values[1] if value else self.values[0]
        if self.kind == "COUNT":
            return self.values[min(int(value), len(self.values) - 1)]
        for upper, points in self.bands:
            if upper is None or value <= upper:
                return points
        raise ValueError(f"value {value!r} falls outside all bands")


@dataclass(frozen=True)
class ScoreTable:
    name: str
    ranges: Mapping[str, Tuple[int, int]]
    points: Mapping[str, Mapping[str, FactorPoints]]
    cutpoints: Mapping[str, Tuple[float, ...]]
    validated: bool = False

    @property
    def outputs(self) -> Tuple[str, ...]:
        return tuple(self.ranges)


# ---------------------------------------------------------------------- #
# Public API
# ---------------------------------------------------------------------- #

def load_table(document: Union[Mapping[str, Any], str, Path]) -> ScoreTable:
    """
    从 dict、JSON 文本或 JSON 文件路径加载并校验评分表。
    """
    if isinstance(document, Path) or (isinstance(document, str) and not document.lstrip().startswith("{")):
        path = Path(document)
        with path.open("r", encoding="utf-8") as f:
            text = f.read()
        source = str(path)
    elif isinstance(document, str):
        text, source = document, "<string>"
    else:
        text, source = None, "<mapping>"

    if text is not None:
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(
                f"score table {source} does not parse: {exc.msg} at line {exc.lineno}"
            ) from exc

    schema_validator = ScoreTableSchemaValidator()
    schema_result = schema_validator.validate(document)
    if not schema_result.ok:
        raise ScoreTableValidationError(schema_result.errors)

    business_result = ScoreTableBusinessValidator().validate(document)
    if not business_result.ok:
        raise ScoreTableValidationError(business_result.violations)

    table = _build(document, schema_validator.factor_kinds)
    logger.info("score_table_loaded", name=table.name, source=source)
    return table


def load_fixture_table() -> ScoreTable:
    return load_table(FIXTURE_TABLE_PATH)


# ---------------------------------------------------------------------- #
# Internal helpers
# ---------------------------------------------------------------------- #

def _build(document: Mapping[str, Any], kinds: Mapping[str, str]) -> ScoreTable:
    points: Dict[str, Mapping[str, FactorPoints]] = {}
    for output, factors in document["points"].items():
        built: Dict[str, FactorPoints] = {}
        for factor, spec in factors.items():
            kind = kinds[factor]
            if kind == "BOOLEAN":
                built[factor] = FactorPoints(kind=kind, values=(float(spec["false"]), float(spec["true"])))
            elif kind == "COUNT":
                built[factor] = FactorPoints(kind=kind, values=tuple(float(v) for v in spec))
            else:
                built[factor] = FactorPoints(
                    kind=kind, bands=tuple((band["max"], float(band["points"])) for band in spec)
                )
        points[output] = MappingProxyType(built)

    return ScoreTable(
        name=document["name"],
        ranges=MappingProxyType({k: (int(v[0]), int(v[1])) for k, v in document["ranges"].items()}),
        points=MappingProxyType(points),
        cutpoints=MappingProxyType({k: tuple(float(c) for c in v) for k, v in document["cutpoints"].items()}),
        validated=True,
    )


__all__ = [
    "FIXTURE_TABLE_PATH",
    "FactorPoints",
    "ScoreTable",
    "ScoreTableValidationError",
    "load_fixture_table",
    "load_table",
]
