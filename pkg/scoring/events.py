from __future__ import annotations

"""
刑事历史事件流。

输入为 JSON Lines，每行一个事件：
    {"kind": "FTA", "date": "2022-06-15"}
    {"kind": "VIOLENT_CONVICTION", "date": "2020-05-05", "severity": "felony"}
空行跳过；任何一行不合法都会以 EventStreamError 报出行号。
"""

import json
from dataclasses import dataclass
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Iterable, List, Optional, Union

from logger.logger import get_logger
from validators.schema_validator import EventSchemaValidator

logger = get_logger(__name__)


class EventKind(str, Enum):
    ARREST = "ARREST"
    MISDEMEANOR_CONVICTION = "MISDEMEANOR_CONVICTION"
    FELONY_CONVICTION = "FELONY_CONVICTION"
    VIOLENT_CONVICTION = "VIOLENT_CONVICTION"
    FTA = "FTA"
    INCARCERATION_SENTENCE = "INCARCERATION_SENTENCE"


class Severity(str, Enum):
    FELONY = "felony"
    MISDEMEANOR = "misdemeanor"


CONVICTION_KINDS = frozenset(
    {EventKind.MISDEMEANOR_CONVICTION, EventKind.FELONY_CONVICTION, EventKind.VIOLENT_CONVICTION}
)


class EventStreamError(ValueError):
    def __init__(self, message: str, line_number: int) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class HistoryEvent:
    kind: EventKind
    date: date
    severity: Optional[Severity] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", EventKind(self.kind))
        if not isinstance(self.date, date):
            raise ValueError(f"HistoryEvent.date must be a date, got {self.date!r}")
        if self.severity is not None:
            object.__setattr__(self, "severity", Severity(self.severity))

    @property
    def is_conviction(self) -> bool:
        return self.kind in CONVICTION_KINDS


def parse_events(lines: Iterable[str]) -> List[HistoryEvent]:
    validator = EventSchemaValidator()
    events: List[HistoryEvent] = []
    for line_number, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            record = json.loads(text)
        except json.JSONDecodeError as exc:
            raise EventStreamError(f"invalid JSON ({exc.msg})", line_number) from exc

        result = validator.validate(record)
        if not result.ok:
            logger.warning("event_stream_invalid", line=line_number, errors=result.errors)
            raise EventStreamError("; ".join(result.errors), line_number)

        events.append(
            HistoryEvent(
                kind=EventKind(record["kind"]),
                date=date.fromisoformat(record["date"]),
                severity=record.get("severity"),
            )
        )
    return events


def read_events(path: Union[str, Path]) -> List[HistoryEvent]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as f:
        events = parse_events(f)
    logger.info("read_events", path=str(path), events=len(events))
    return events


__all__ = [
    "CONVICTION_KINDS",
    "EventKind",
    "EventStreamError",
    "HistoryEvent",
    "Severity",
    "parse_events",
    "read_events",
]
