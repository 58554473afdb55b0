# logger/trace.py
# 每次 CLI 调用一个 run id，写入每行日志与 RunManifest
import uuid
import contextvars
from typing import Optional

trace_id_var: contextvars.ContextVar[Optional[str]] = contextvars.ContextVar("trace_id", default=None)


def new_trace() -> str:
    trace_id = uuid.uuid4().hex[:12]
    trace_id_var.set(trace_id)
    return trace_id


def get_trace() -> Optional[str]:
    return trace_id_var.get()
