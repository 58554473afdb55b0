from __future__ import annotations

"""
结构（schema）校验。

根据 `config/data_schema.yaml` 中对事件流与评分表文档的定义，
检查字段是否齐全、取值是否在枚举内、各因子分值的形状是否与其类型一致。
数值上的业务约束（单调性、声明分值范围）由 business_validator 负责。
"""

from dataclasses import dataclass
from datetime import date
from numbers import Real
from pathlib import Path
from typing import Any, Dict, List, Tuple

import yaml

from logger.logger import get_logger

logger = get_logger(__name__)


def _load_data_schema() -> Dict[str, Any]:
    project_root = Path(__file__).resolve().parents[1]
    with (project_root / "config" / "data_schema.yaml").open("r", encoding="utf-8") as f:
        return yaml.safe_load(f)


def _parse_enum(enum_decl: str) -> List[str]:
    """
    将 "ENUM[a, b, c]" 解析为 ["a", "b", "c"]。
    """
    if not isinstance(enum_decl, str) or not enum_decl.startswith("ENUM["):
        return []
    inner = enum_decl[len("ENUM[") : -1]
    return [v.strip() for v in inner.split(",") if v.strip()]


def _is_number(value: Any) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool)


@dataclass
class SchemaValidationResult:
    ok: bool
    errors: List[str]

    def raise_if_failed(self) -> None:
        if not self.ok:
            raise ValueError("schema validation failed: " + "; ".join(self.errors))


class EventSchemaValidator:
    """
    校验事件流中的单条记录：{"kind": ..., "date": "YYYY-MM-DD", 可选 "severity"}。
    """

    def __init__(self) -> None:
        stream_cfg = _load_data_schema().get("event_stream", {})
        fields = stream_cfg.get("fields", {})
        self.allowed_kinds: List[str] = _parse_enum(fields.get("kind", ""))
        self.allowed_severities: List[str] = _parse_enum(fields.get("severity", ""))
        self.required_fields: List[str] = list(stream_cfg.get("required", []))
        self.known_fields = set(fields)

    def validate(self, record: Any) -> SchemaValidationResult:
        errors: List[str] = []
        if not isinstance(record, dict):
            return SchemaValidationResult(ok=False, errors=["event must be a JSON object"])

        for name in self.required_fields:
            if name not in record:
                errors.append(f"missing required field: {name}")
        for name in record:
            if name not in self.known_fields:
                errors.append(f"unknown field: {name}")

        kind = record.get("kind")
        if "kind" in record and kind not in self.allowed_kinds:
            errors.append(f"invalid kind: {kind!r}, allowed={self.allowed_kinds}")

        raw_date = record.get("date")
        if "date" in record:
            if not isinstance(raw_date, str):
                errors.append(f"date must be a YYYY-MM-DD string, got {raw_date!r}")
            else:
                try:
                    date.fromisoformat(raw_date)
                except ValueError:
                    errors.append(f"invalid date: {raw_date!r}")

        severity = record.get("severity")
        if severity is not None and severity not in self.allowed_severities:
            errors.append(f"invalid severity: {severity!r}, allowed={self.allowed_severities}")

        return SchemaValidationResult(ok=not errors, errors=errors)


class ScoreTableSchemaValidator:
    """
    校验评分表 JSON 文档的结构：

    - 必需 section：name / ranges / points / cutpoints；
    - 每个输出（fta / nca / nvca）在三个 section 中都有条目；
    - 因子名属于九个已知因子，分值形状符合因子类型（BANDS / BOOLEAN / COUNT）。
    """

    def __init__(self) -> None:
        table_cfg = _load_data_schema().get("score_table", {})
        self.required_sections: List[str] = list(table_cfg.get("required_sections", []))
        self.outputs: List[str] = list(table_cfg.get("outputs", []))
        self.factor_kinds: Dict[str, str] = dict(table_cfg.get("factors", {}))

    # ------------------------------------------------------------------ #
    # Public API
    # ------------------------------------------------------------------ #
    def validate(self, document: Any) -> SchemaValidationResult:
        if not isinstance(document, dict):
            return SchemaValidationResult(ok=False, errors=["score table must be a JSON object"])

        errors: List[str] = []
        for section in self.required_sections:
            if section not in document:
                errors.append(f"missing required section: {section}")
        if errors:
            return self._finish(errors)

        if not isinstance(document["name"], str) or not document["name"]:
            errors.append("name must be a non-empty string")

        for section in ("ranges", "points", "cutpoints"):
            body = document[section]
            if not isinstance(body, dict):
                errors.append(f"{section} must be an object keyed by output")
                continue
            for output in self.outputs:
                if output not in body:
                    errors.append(f"{section}.{output} is missing")
            for key in body:
                if key not in self.outputs:
                    errors.append(f"{section}.{key}: unknown output, allowed={self.outputs}")

        if isinstance(document["ranges"], dict):
            for output, bounds in document["ranges"].items():
                if not (
                    isinstance(bounds, list)
                    and len(bounds) == 2
                    and all(isinstance(v, int) and not isinstance(v, bool) for v in bounds)
                ):
                    errors.append(f"ranges.{output} must be [min, max] integers")

        if isinstance(document["points"], dict):
            for output, factors in document["points"].items():
                if not isinstance(factors, dict):
                    errors.append(f"points.{output} must be an object keyed by factor")
                    continue
                for factor, spec in factors.items():
                    self._validate_factor(f"points.{output}.{factor}", factor, spec, errors)

        if isinstance(document["cutpoints"], dict):
            for output, cuts in document["cutpoints"].items():
                if not (isinstance(cuts, list) and all(_is_number(v) for v in cuts)):
                    errors.append(f"cutpoints.{output} must be a list of numbers")

        return self._finish(errors)

    # ------------------------------------------------------------------ #
    # Internal helpers
    # ------------------------------------------------------------------ #
    def _validate_factor(self, path: str, factor: str, spec: Any, errors: List[str]) -> None:
        kind = self.factor_kinds.get(factor)
        if kind is None:
            errors.append(f"{path}: unknown factor, allowed={sorted(self.factor_kinds)}")
            return

        if kind == "BOOLEAN":
            if not (
                isinstance(spec, dict)
                and set(spec) == {"true", "false"}
                and all(_is_number(v) for v in spec.values())
            ):
                errors.append(f'{path}: BOOLEAN factor expects {{"true": number, "false": number}}')
        elif kind == "COUNT":
            if not (isinstance(spec, list) and spec and all(_is_number(v) for v in spec)):
                errors.append(f"{path}: COUNT factor expects a non-empty list of numbers")
        elif kind == "BANDS":
            ok = isinstance(spec, list) and bool(spec)
            if ok:
                for band in spec:
                    if not (
                        isinstance(band, dict)
                        and set(band) == {"max", "points"}
                        and (band["max"] is None or (isinstance(band["max"], int) and not isinstance(band["max"], bool)))
                        and _is_number(band["points"])
                    ):
                        ok = False
                        break
            if not ok:
                errors.append(f'{path}: BANDS factor expects [{{"max": int|null, "points": number}}, ...]')

    @staticmethod
    def _finish(errors: List[str]) -> SchemaValidationResult:
        ok = not errors
        if not ok:
            logger.warning("score_table_schema_invalid", errors=len(errors), first=errors[0])
        return SchemaValidationResult(ok=ok, errors=errors)


def validate_event_record(record: Any) -> Tuple[bool, List[str]]:
    """
    便捷函数，供事件流读取器调用。
    """
    result = EventSchemaValidator().validate(record)
    return result.ok, result.errors


__all__ = [
    "EventSchemaValidator",
    "SchemaValidationResult",
    "ScoreTableSchemaValidator",
    "validate_event_record",
]
