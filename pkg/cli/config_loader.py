from __future__ import annotations

"""
场景配置加载。

优先级（后者覆盖前者）：
    config/simulation.yaml 默认值 → --preset → --config JSON → 命令行 flag

--config 既可以是场景 JSON，也可以是某次运行写出的 RunManifest（取其中的 config 段），
用于逐位复现该次运行。
"""

import copy
import json
import os
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import yaml
from pydantic import ValidationError

from cohort.engine import CohortSpec, GroupSpec
from logger.logger import get_logger
from process_core.bias import BiasSpec
from process_core.trajectory import ILLUSTRATION_PRESETS
from process_core.urn import UrnParams
from .schemas import BiasConfig, ScenarioConfig, UrnConfig

logger = get_logger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parents[1]
SIMULATION_CONFIG_PATH = PROJECT_ROOT / "config" / "simulation.yaml"


class ConfigValidationError(ValueError):
    def __init__(self, message: str, key_paths: Optional[List[str]] = None) -> None:
        super().__init__(message)
        self.key_paths = list(key_paths or [])


def _load_simulation_yaml() -> Dict[str, Any]:
    with SIMULATION_CONFIG_PATH.open("r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def default_document() -> Dict[str, Any]:
    raw = _load_simulation_yaml()
    output = dict(raw.get("output", {}))
    return {
        "urn": dict(raw.get("urn", {})),
        "bias": dict(raw.get("bias", {})),
        "steps": raw.get("steps", 10),
        "trajectories": raw.get("trajectories", 5),
        "seed": raw.get("seed", 0),
        "output": output,
    }


def available_presets() -> List[str]:
    return sorted(ILLUSTRATION_PRESETS)


def _deep_merge(base: Dict[str, Any], update: Mapping[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _set_path(doc: Dict[str, Any], dotted: str, value: Any) -> None:
    parts = dotted.split(".")
    node = doc
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    node[parts[-1]] = value


def read_config_document(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as f:
        text = f.read()
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigValidationError(
            f"config {path} is not valid JSON: {exc.msg} at line {exc.lineno}", ["<root>"]
        ) from exc
    if not isinstance(document, dict):
        raise ConfigValidationError(f"config {path} must be a JSON object", ["<root>"])

    # RunManifest：取 config 段复现
    if "config" in document and "tool" in document and "run_id" in document:
        logger.info("config_from_manifest", path=str(path), run_id=document.get("run_id"))
        document = document["config"]
        if not isinstance(document, dict):
            raise ConfigValidationError(f"manifest {path} has a malformed config section", ["config"])
    return document


def load_scenario(
    config_path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    preset: Optional[str] = None,
) -> ScenarioConfig:
    """
    overrides 的键为点分路径（如 "urn.k"、"output.format"），值为 None 的项忽略。
    """
    document = default_document()

    if preset is not None:
        if preset not in ILLUSTRATION_PRESETS:
            raise ConfigValidationError(
                f"unknown preset {preset!r}, available={available_presets()}", ["preset"]
            )
        document = _deep_merge(document, ILLUSTRATION_PRESETS[preset].to_document())

    if config_path is not None:
        document = _deep_merge(document, read_config_document(config_path))

    for dotted, value in (overrides or {}).items():
        if value is not None:
            _set_path(document, dotted, value)

    try:
        scenario = ScenarioConfig.model_validate(document)
    except ValidationError as exc:
        key_paths = [".".join(str(part) for part in err["loc"]) or "<root>" for err in exc.errors()]
        details = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors()
        )
        logger.warning("config_invalid", key_paths=key_paths)
        raise ConfigValidationError(f"invalid configuration: {details}", key_paths) from exc

    logger.debug("config_loaded", steps=scenario.steps, trajectories=scenario.trajectories, seed=scenario.seed)
    return scenario


def resolve_threads(flag: Optional[int]) -> int:
    """
    --threads → RDL_THREADS → simulation.yaml engine.threads。
    """
    if flag is not None:
        threads = flag
    elif os.getenv("RDL_THREADS"):
        try:
            threads = int(os.environ["RDL_THREADS"])
        except ValueError as exc:
            raise ConfigValidationError(
                f"RDL_THREADS must be an integer, got {os.environ['RDL_THREADS']!r}", ["threads"]
            ) from exc
    else:
        threads = int(_load_simulation_yaml().get("engine", {}).get("threads", 1))
    if threads < 1:
        raise ConfigValidationError(f"threads must be >= 1, got {threads}", ["threads"])
    return threads


# ---------------------------------------------------------------------- #
# 转换为领域对象
# ---------------------------------------------------------------------- #

def to_urn(cfg: UrnConfig) -> UrnParams:
    return UrnParams(b0=cfg.b0, r0=cfg.r0, k=cfg.k)


def to_bias(cfg: BiasConfig) -> BiasSpec:
    return BiasSpec(rho=cfg.rho, group_indicator=cfg.group_indicator, clamp_policy=cfg.clamp)


def to_cohort_spec(scenario: ScenarioConfig, record_full_paths: Optional[bool] = None) -> CohortSpec:
    """
    未配置 groups 时，以顶层 urn / bias / trajectories 组成单组 "all"。
    """
    if scenario.groups:
        groups = tuple(
            GroupSpec(name=g.name, size=g.size, urn=to_urn(g.urn), bias=to_bias(g.bias))
            for g in scenario.groups
        )
    else:
        groups = (
            GroupSpec(
                name="all",
                size=scenario.trajectories,
                urn=to_urn(scenario.urn),
                bias=to_bias(scenario.bias),
            ),
        )
    output = scenario.output
    return CohortSpec(
        groups=groups,
        n_steps=scenario.steps,
        master_seed=scenario.seed,
        record_full_paths=output.record_full_paths if record_full_paths is None else record_full_paths,
        checkpoints=tuple(output.checkpoint_steps) if output.checkpoint_steps else None,
        grid_points=output.checkpoints,
    )


__all__ = [
    "ConfigValidationError",
    "available_presets",
    "default_document",
    "load_scenario",
    "read_config_document",
    "resolve_threads",
    "to_bias",
    "to_cohort_spec",
    "to_urn",
]
