from __future__ import annotations

"""
输出写出：RFC-4180 CSV（CRLF 行尾、必有表头、概率 17 位有效数字）、JSON、RunManifest。

所有写出都在主线程中按 (group, member, step) 顺序进行。
"""

import csv
import json
import math
import sys
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, TextIO, Union

import numpy as np

from cohort.engine import CohortResult
from logger.logger import get_logger
from process_core.trajectory import Trajectory
from .schemas import RunManifest, ScenarioConfig

logger = get_logger(__name__)

TOOL_VERSION = "0.3.0"
FLOAT_FORMAT = "%.17g"


def fmt_float(value: float) -> str:
    return FLOAT_FORMAT % value


@contextmanager
def open_output(path: Optional[Union[str, Path]]) -> Iterator[TextIO]:
    """
    path 为空时写 stdout。
    """
    if path is None:
        yield sys.stdout
        sys.stdout.flush()
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        yield f


def _csv_writer(stream: TextIO):
    return csv.writer(stream, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)


# ---------------------------------------------------------------------- #
# 轨迹 / 检查点
# ---------------------------------------------------------------------- #

def write_trajectory_csv(stream: TextIO, trajectories: Sequence[Trajectory], ids: Optional[Sequence[str]] = None) -> int:
    """
    列：trajectory_id, step, p, outcome。outcome 为第 step 次决策的 X，最后一步为空。
    """
    writer = _csv_writer(stream)
    writer.writerow(["trajectory_id", "step", "p", "outcome"])
    rows = 0
    for idx, traj in enumerate(trajectories):
        tid = ids[idx] if ids is not None else str(idx)
        for step_idx, p in enumerate(traj.probabilities):
            outcome = traj.outcomes[step_idx] if step_idx < len(traj.outcomes) else ""
            writer.writerow([tid, step_idx + 1, fmt_float(p), outcome])
            rows += 1
    return rows


def trajectories_to_dict(trajectories: Sequence[Trajectory], ids: Optional[Sequence[str]] = None) -> List[Dict[str, Any]]:
    return [
        {
            "trajectory_id": ids[idx] if ids is not None else str(idx),
            "p": list(traj.probabilities),
            "outcomes": list(traj.outcomes),
            "out_of_regime_steps": traj.out_of_regime_steps,
        }
        for idx, traj in enumerate(trajectories)
    ]


def write_checkpoint_csv(stream: TextIO, result: CohortResult) -> int:
    writer = _csv_writer(stream)
    writer.writerow(["group", "step", "mean_p", "se"])
    rows = 0
    for g in result.groups:
        cp = g.checkpoint_p
        means = cp.mean(axis=0)
        ses = cp.std(axis=0, ddof=1) / np.sqrt(cp.shape[0]) if cp.shape[0] > 1 else np.zeros(cp.shape[1])
        for col, step in enumerate(result.checkpoints):
            writer.writerow([g.name, int(step), fmt_float(float(means[col])), fmt_float(float(ses[col]))])
            rows += 1
    return rows


def write_endpoint_csv(stream: TextIO, result: CohortResult) -> int:
    writer = _csv_writer(stream)
    writer.writerow(["group", "member", "p", "successes"])
    rows = 0
    for g in result.groups:
        for j in range(g.endpoints.shape[0]):
            writer.writerow([g.name, j, fmt_float(float(g.endpoints[j])), int(g.successes[j])])
            rows += 1
    return rows


# ---------------------------------------------------------------------- #
# JSON / manifest
# ---------------------------------------------------------------------- #

def _jsonable(value: Any) -> Any:
    # 非有限浮点写为 null
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def dumps_json(data: Any) -> str:
    return json.dumps(_jsonable(data), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(stream: TextIO, data: Any) -> None:
    stream.write(dumps_json(data))


def build_manifest(
    command: str,
    run_id: str,
    scenario: ScenarioConfig,
    seed_derivations: Optional[Dict[str, Any]] = None,
    parameters: Optional[Dict[str, Any]] = None,
    outputs: Optional[List[str]] = None,
) -> RunManifest:
    return RunManifest(
        version=TOOL_VERSION,
        command=command,
        run_id=run_id,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        master_seed=scenario.seed,
        config=scenario,
        seed_derivations=seed_derivations or {},
        parameters=parameters or {},
        outputs=outputs or [],
    )


def manifest_path_for(out: Optional[Union[str, Path]], explicit: Optional[Union[str, Path]] = None) -> Optional[Path]:
    if explicit is not None:
        return Path(explicit)
    if out is None:
        return None
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


def write_manifest(manifest: RunManifest, path: Optional[Path]) -> None:
    """
    path 为空（结果写到 stdout）时，清单写到 stderr。
    """
    text = dumps_json(manifest.model_dump(mode="json"))
    if path is None:
        sys.stderr.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("manifest_written", path=str(path), run_id=manifest.run_id)


__all__ = [
    "FLOAT_FORMAT",
    "TOOL_VERSION",
    "build_manifest",
    "dumps_json",
    "fmt_float",
    "manifest_path_for",
    "open_output",
    "trajectories_to_dict",
    "write_checkpoint_csv",
    "write_endpoint_csv",
    "write_json",
    "write_manifest",
    "write_trajectory_csv",
]
