from __future__ import annotations

"""
由事件流推导九个风险因子。

计数规则：
- 只统计日期严格早于 as_of 的事件；as_of 当天的事件接受但不计入，晚于 as_of 的事件拒绝；
- FTA 以 as_of 前推两个日历年为界，边界当天计入近期（2 月 29 日前推落到 2 月 28 日）；
- VIOLENT_CONVICTION 同时算作一次定罪，等级取事件的 severity，缺省按 violent_default_severity。

批量打分时也可直接读入已推导好的因子记录（parse_records / read_records）。
"""

import json
from dataclasses import asdict, dataclass, fields
from datetime import date
from pathlib import Path
from typing import Iterable, List, Optional, Union

import yaml

from logger.logger import get_logger
from .events import EventKind, EventStreamError, HistoryEvent, Severity

logger = get_logger(__name__)


def _load_rules() -> dict:
    project_root = Path(__file__).resolve().parents[1]
    with (project_root / "config" / "rules.yaml").open("r", encoding="utf-8") as f:
        return yaml.safe_load(f).get("scoring", {})


_RULES = _load_rules()
VIOLENT_DEFAULT_SEVERITY = Severity(_RULES.get("violent_default_severity", "felony"))
FTA_RECENT_YEARS: int = int(_RULES.get("fta_recent_years", 2))


@dataclass(frozen=True)
class CurrentCharge:
    age: int
    violent_offense: bool = False
    pending_charge: bool = False

    def __post_init__(self) -> None:
        if isinstance(self.age, bool) or not isinstance(self.age, int) or not (0 <= self.age <= 130):
            raise ValueError(f"CurrentCharge.age must be an integer in [0, 130], got {self.age!r}")


@dataclass(frozen=True)
class DefendantRecord:
    age_at_arrest: int
    current_violent_offense: bool
    pending_charge_at_offense: bool
    prior_misdemeanor: bool
    prior_felony: bool
    prior_violent_conviction_count: int
    fta_within_2yr_count: int
    fta_older_2yr_count: int
    prior_incarceration: bool

    def __post_init__(self) -> None:
        if isinstance(self.age_at_arrest, bool) or not isinstance(self.age_at_arrest, int) or not (
            0 <= self.age_at_arrest <= 130
        ):
            raise ValueError(
                f"DefendantRecord.age_at_arrest must be an integer in [0, 130], got {self.age_at_arrest!r}"
            )
        for name in ("prior_violent_conviction_count", "fta_within_2yr_count", "fta_older_2yr_count"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ValueError(f"DefendantRecord.{name} must be an integer >= 0, got {value!r}")
        for name in (
            "current_violent_offense",
            "pending_charge_at_offense",
            "prior_misdemeanor",
            "prior_felony",
            "prior_incarceration",
        ):
            value = getattr(self, name)
            if not isinstance(value, bool):
                raise ValueError(f"DefendantRecord.{name} must be a boolean, got {value!r}")

    def to_dict(self) -> dict:
        return asdict(self)


def years_before(day: date, years: int) -> date:
    try:
        return day.replace(year=day.year - years)
    except ValueError:
        # 2 月 29 日
        return day.replace(year=day.year - years, day=28)


def derive_factors(
    events: Iterable[HistoryEvent],
    current: CurrentCharge,
    as_of: date,
    violent_default_severity: Optional[Severity] = None,
) -> DefendantRecord:
    default_severity = Severity(violent_default_severity or VIOLENT_DEFAULT_SEVERITY)
    boundary = years_before(as_of, FTA_RECENT_YEARS)

    prior_misdemeanor = False
    prior_felony = False
    violent_count = 0
    fta_recent = 0
    fta_older = 0
    incarceration = False
    skipped_same_day = 0

    for event in events:
        if event.date > as_of:
            raise ValueError(
                f"event {event.kind.value} dated {event.date.isoformat()} is after as_of {as_of.isoformat()}"
            )
        if event.date == as_of:
            skipped_same_day += 1
            continue

        if event.kind is EventKind.MISDEMEANOR_CONVICTION:
            prior_misdemeanor = True
        elif event.kind is EventKind.FELONY_CONVICTION:
            prior_felony = True
        elif event.kind is EventKind.VIOLENT_CONVICTION:
            violent_count += 1
            if (event.severity or default_severity) is Severity.FELONY:
                prior_felony = True
            else:
                prior_misdemeanor = True
        elif event.kind is EventKind.FTA:
            if event.date >= boundary:
                fta_recent += 1
            else:
                fta_older += 1
        elif event.kind is EventKind.INCARCERATION_SENTENCE:
            incarceration = True

    if skipped_same_day:
        logger.debug("derive_factors_same_day_events", skipped=skipped_same_day, as_of=as_of.isoformat())

    return DefendantRecord(
        age_at_arrest=current.age,
        current_violent_offense=bool(current.violent_offense),
        pending_charge_at_offense=bool(current.pending_charge),
        prior_misdemeanor=prior_misdemeanor,
        prior_felony=prior_felony,
        prior_violent_conviction_count=violent_count,
        fta_within_2yr_count=fta_recent,
        fta_older_2yr_count=fta_older,
        prior_incarceration=incarceration,
    )


_RECORD_FIELDS = tuple(f.name for f in fields(DefendantRecord))


def parse_records(lines: Iterable[str]) -> List[DefendantRecord]:
    """
    JSON Lines 的因子记录，每行一个 DefendantRecord 的九个字段；空行跳过，错误带行号。
    """
    records: List[DefendantRecord] = []
    for line_number, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise EventStreamError(f"invalid JSON ({exc.msg})", line_number) from exc
        if not isinstance(raw, dict):
            raise EventStreamError(f"expected a JSON object, got {type(raw).__name__}", line_number)

        missing = [name for name in _RECORD_FIELDS if name not in raw]
        unknown = sorted(set(raw) - set(_RECORD_FIELDS))
        if missing or unknown:
            raise EventStreamError(f"missing fields {missing}, unknown fields {unknown}", line_number)
        try:
            records.append(DefendantRecord(**raw))
        except ValueError as exc:
            raise EventStreamError(str(exc), line_number) from exc
    return records


def read_records(path: Union[str, Path]) -> List[DefendantRecord]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as f:
        records = parse_records(f)
    if not records:
        raise ValueError(f"record file {path} contains no records")
    logger.info("read_records", path=str(path), records=len(records))
    return records


__all__ = [
    "CurrentCharge",
    "DefendantRecord",
    "VIOLENT_DEFAULT_SEVERITY",
    "derive_factors",
    "parse_records",
    "read_records",
    "years_before",
]
