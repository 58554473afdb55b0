from __future__ import annotations

"""
统一结构化日志。

每条日志一行，格式：
    [ts] [LEVEL] [name] [trace_id=…] event | key=value …

- 输出到 stderr，stdout 留给 CSV / JSON 结果；
- 最低级别取自 `config/log_config.yaml` 中 root.level，可用环境变量 RDL_LOG_LEVEL 覆盖。
"""

import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

import yaml

from .trace import get_trace

_LEVELS = {"DEBUG": 10, "INFO": 20, "WARNING": 30, "ERROR": 40}


def _load_min_level() -> int:
    project_root = Path(__file__).resolve().parents[1]
    cfg_path = project_root / "config" / "log_config.yaml"
    level = "INFO"
    if cfg_path.exists():
        with cfg_path.open("r", encoding="utf-8") as f:
            cfg = yaml.safe_load(f) or {}
        level = str(cfg.get("root", {}).get("level", level))
    level = os.getenv("RDL_LOG_LEVEL", level).upper()
    return _LEVELS.get(level, _LEVELS["INFO"])


_MIN_LEVEL = _load_min_level()


@dataclass
class SimpleLogger:
    name: str

    def _log(self, level: str, message: str, **extra: Any) -> None:
        if _LEVELS[level] < _MIN_LEVEL:
            return
        ts = datetime.now(timezone.utc).strftime("%Y-%m-%d %H:%M:%S")
        trace_id = get_trace() or "-"
        extra_str = " ".join(f"{k}={v!r}" for k, v in extra.items()) if extra else ""
        line = f"[{ts}] [{level}] [{self.name}] [trace_id={trace_id}] {message}"
        if extra_str:
            line = f"{line} | {extra_str}"
        print(line, file=sys.stderr, flush=True)

    def info(self, msg: str, **extra: Any) -> None:
        self._log("INFO", msg, **extra)

    def warning(self, msg: str, **extra: Any) -> None:
        self._log("WARNING", msg, **extra)

    def error(self, msg: str, **extra: Any) -> None:
        self._log("ERROR", msg, **extra)

    def debug(self, msg: str, **extra: Any) -> None:
        self._log("DEBUG", msg, **extra)


def get_logger(name: Optional[str] = None) -> SimpleLogger:
    """
    获取结构化 logger，name 为空时默认为 "rdl"。
    """
    return SimpleLogger(name=name or "rdl")


__all__ = ["get_logger", "SimpleLogger"]
