# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：test_scoring.py
@Description：事件流解析、九因子派生、评分表加载与打分（含单调性性质）
"""

import json
from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scoring.events import EventKind, EventStreamError, HistoryEvent, Severity, parse_events
from scoring.factors import (
    CurrentCharge,
    DefendantRecord,
    derive_factors,
    parse_records,
    read_records,
    years_before,
)
from scoring.scorer import RiskScores, describe_scores, raw_points, score, score_arrays
from scoring.table import (
    FIXTURE_TABLE_PATH,
    ScoreTable,
    ScoreTableValidationError,
    load_table,
)

AS_OF = date(2024, 6, 15)


def _record(**overrides) -> DefendantRecord:
    base = dict(
        age_at_arrest=40,
        current_violent_offense=False,
        pending_charge_at_offense=False,
        prior_misdemeanor=False,
        prior_felony=False,
        prior_violent_conviction_count=0,
        fta_within_2yr_count=0,
        fta_older_2yr_count=0,
        prior_incarceration=False,
    )
    base.update(overrides)
    return DefendantRecord(**base)


# ---------------------------------------------------------------------- #
# 事件流
# ---------------------------------------------------------------------- #

def test_fixture_events_parse(fixture_events):
    assert len(fixture_events) == 7
    assert fixture_events[0] == HistoryEvent(EventKind.ARREST, date(2016, 3, 2))
    assert sum(e.is_conviction for e in fixture_events) == 2


def test_parse_events_reports_line_numbers():
    lines = ['{"kind": "FTA", "date": "2020-01-01"}', "", "{not json"]
    with pytest.raises(EventStreamError) as info:
        parse_events(lines)
    assert info.value.line_number == 3
    assert str(info.value).startswith("line 3:")


def test_parse_events_rejects_schema_errors():
    with pytest.raises(EventStreamError) as info:
        parse_events(['{"kind": "FTA", "date": "2020-13-01"}'])
    assert "invalid date" in str(info.value)


def test_history_event_coerces_strings():
    event = HistoryEvent("VIOLENT_CONVICTION", date(2020, 1, 1), "misdemeanor")
    assert event.kind is EventKind.VIOLENT_CONVICTION
    assert event.severity is Severity.MISDEMEANOR


# ---------------------------------------------------------------------- #
# 因子派生
# ---------------------------------------------------------------------- #

def test_fixture_record(fixture_events, fixture_as_of):
    record = derive_factors(
        fixture_events, CurrentCharge(age=21, violent_offense=True, pending_charge=False), fixture_as_of
    )
    assert record == _record(
        age_at_arrest=21,
        current_violent_offense=True,
        prior_misdemeanor=True,
        prior_felony=True,
        prior_violent_conviction_count=1,
        fta_within_2yr_count=1,
        fta_older_2yr_count=1,
        prior_incarceration=True,
    )


def test_violent_severity_default_and_override():
    events = [HistoryEvent(EventKind.VIOLENT_CONVICTION, date(2020, 1, 1))]
    assert derive_factors(events, CurrentCharge(age=30), AS_OF).prior_felony
    overridden = derive_factors(events, CurrentCharge(age=30), AS_OF, violent_default_severity=Severity.MISDEMEANOR)
    assert overridden.prior_misdemeanor and not overridden.prior_felony
    tagged = [HistoryEvent(EventKind.VIOLENT_CONVICTION, date(2020, 1, 1), Severity.MISDEMEANOR)]
    assert not derive_factors(tagged, CurrentCharge(age=30), AS_OF).prior_felony


def test_fta_window_boundary_is_recent():
    events = [
        HistoryEvent(EventKind.FTA, date(2022, 6, 15)),
        HistoryEvent(EventKind.FTA, date(2022, 6, 14)),
    ]
    record = derive_factors(events, CurrentCharge(age=30), AS_OF)
    assert (record.fta_within_2yr_count, record.fta_older_2yr_count) == (1, 1)


def test_same_day_events_are_ignored_and_future_events_rejected():
    same_day = [HistoryEvent(EventKind.FELONY_CONVICTION, AS_OF)]
    assert not derive_factors(same_day, CurrentCharge(age=30), AS_OF).prior_felony
    with pytest.raises(ValueError):
        derive_factors([HistoryEvent(EventKind.FTA, date(2024, 6, 16))], CurrentCharge(age=30), AS_OF)


def test_years_before_leap_day():
    assert years_before(date(2024, 2, 29), 2) == date(2022, 2, 28)
    assert years_before(date(2024, 6, 15), 2) == date(2022, 6, 15)


def test_record_type_validation():
    with pytest.raises(ValueError):
        _record(prior_felony=1)
    with pytest.raises(ValueError):
        _record(fta_within_2yr_count=-1)
    with pytest.raises(ValueError):
        _record(age_at_arrest=True)
    with pytest.raises(ValueError):
        CurrentCharge(age=131)


def test_record_file_matches_derived_fixture_record(fixture_dir, fixture_events, fixture_as_of):
    records = read_records(fixture_dir / "records_fixture.jsonl")
    assert len(records) == 3
    assert records[0] == derive_factors(
        fixture_events, CurrentCharge(age=21, violent_offense=True, pending_charge=False), fixture_as_of
    )
    assert records[2].fta_within_2yr_count == 2


@pytest.mark.parametrize(
    "line, message",
    [
        ("[1, 2]", "JSON object"),
        ('{"age_at_arrest": 30}', "missing fields"),
        (json.dumps({**_record().to_dict(), "zip_code": "00000"}), "unknown fields"),
        (json.dumps({**_record().to_dict(), "prior_felony": 1}), "prior_felony"),
    ],
)
def test_parse_records_reports_line_numbers(line, message):
    with pytest.raises(EventStreamError, match=message) as info:
        parse_records([json.dumps(_record().to_dict()), "", line])
    assert info.value.line_number == 3


# ---------------------------------------------------------------------- #
# 评分表与打分
# ---------------------------------------------------------------------- #

def test_fixture_scores(fixture_events, fixture_as_of, fixture_table):
    record = derive_factors(fixture_events, CurrentCharge(age=21, violent_offense=True), fixture_as_of)
    assert raw_points(record, fixture_table) == {"fta": 4.0, "nca": 8.0, "nvca": 3.0}
    assert score(record, fixture_table) == RiskScores(fta=4, nca=5, nvca=1)


def test_empty_history_gets_minimum_scores(fixture_table):
    record = derive_factors([], CurrentCharge(age=33), AS_OF)
    assert score(record, fixture_table).to_dict() == {"fta": 1, "nca": 1, "nvca": 0}


def test_scores_are_capped_at_range_maximum(fixture_table):
    record = _record(
        age_at_arrest=19,
        current_violent_offense=True,
        pending_charge_at_offense=True,
        prior_misdemeanor=True,
        prior_felony=True,
        prior_violent_conviction_count=9,
        fta_within_2yr_count=9,
        fta_older_2yr_count=9,
        prior_incarceration=True,
    )
    assert score(record, fixture_table) == RiskScores(fta=6, nca=6, nvca=1)


def test_score_requires_loaded_table(fixture_table):
    unvalidated = ScoreTable(
        name="raw",
        ranges=fixture_table.ranges,
        points=fixture_table.points,
        cutpoints=fixture_table.cutpoints,
    )
    with pytest.raises(ValueError):
        score(_record(), unvalidated)
    with pytest.raises(ValueError):
        score({"age_at_arrest": 30}, fixture_table)


def test_load_table_from_string_and_mapping():
    text = FIXTURE_TABLE_PATH.read_text(encoding="utf-8")
    assert load_table(text).name == "synthetic_fixture"
    assert load_table(json.loads(text)).outputs == ("fta", "nca", "nvca")
    assert load_table(str(FIXTURE_TABLE_PATH)).validated


def test_load_table_rejects_invalid_documents():
    doc = json.loads(FIXTURE_TABLE_PATH.read_text(encoding="utf-8"))
    doc["ranges"]["nvca"] = [0, 2]
    doc["cutpoints"]["nvca"] = [3, 4]
    with pytest.raises(ScoreTableValidationError) as info:
        load_table(doc)
    assert "ranges.nvca: declared [0, 2] conflicts with required [0, 1]" in info.value.violations
    with pytest.raises(ValueError):
        load_table("{broken json")


def test_loaded_table_is_read_only(fixture_table):
    with pytest.raises(TypeError):
        fixture_table.cutpoints["fta"] = (0,)


def test_describe_scores():
    summary = describe_scores([RiskScores(1, 2, 0), RiskScores(3, 4, 1), RiskScores(5, 6, 1)])
    assert summary["fta"]["mean"] == 3.0
    assert summary["nca"]["50%"] == 4.0
    assert summary["nvca"]["count"] == 3.0
    with pytest.raises(ValueError):
        describe_scores([])


# ---------------------------------------------------------------------- #
# 性质检验
# ---------------------------------------------------------------------- #

records = st.builds(
    DefendantRecord,
    age_at_arrest=st.integers(18, 90),
    current_violent_offense=st.booleans(),
    pending_charge_at_offense=st.booleans(),
    prior_misdemeanor=st.booleans(),
    prior_felony=st.booleans(),
    prior_violent_conviction_count=st.integers(0, 6),
    fta_within_2yr_count=st.integers(0, 6),
    fta_older_2yr_count=st.integers(0, 6),
    prior_incarceration=st.booleans(),
)

_BOOLEAN_FACTORS = [
    "current_violent_offense",
    "pending_charge_at_offense",
    "prior_misdemeanor",
    "prior_felony",
    "prior_incarceration",
]
_COUNT_FACTORS = ["prior_violent_conviction_count", "fta_within_2yr_count", "fta_older_2yr_count"]

nondecreasing = st.lists(st.integers(0, 3), min_size=1, max_size=5).map(
    lambda steps: [int(v) for v in np.cumsum(steps)]
)


@st.composite
def monotone_tables(draw):
    """随机的单调评分表：BOOLEAN true ≥ false，COUNT 非降，年龄分档固定。"""
    points = {}
    for output in ("fta", "nca", "nvca"):
        factors = {}
        for name in _BOOLEAN_FACTORS:
            if draw(st.booleans()):
                low = draw(st.integers(0, 2))
                factors[name] = {"false": low, "true": low + draw(st.integers(0, 3))}
        for name in _COUNT_FACTORS:
            if draw(st.booleans()):
                factors[name] = draw(nondecreasing)
        if draw(st.booleans()):
            factors["age_at_arrest"] = [{"max": 22, "points": 2}, {"max": None, "points": 0}]
        points[output] = factors
    six = st.lists(st.integers(1, 4), min_size=5, max_size=5).map(lambda d: [int(v) for v in np.cumsum(d)])
    return {
        "name": "random",
        "ranges": {"fta": [1, 6], "nca": [1, 6], "nvca": [0, 1]},
        "points": points,
        "cutpoints": {"fta": draw(six), "nca": draw(six), "nvca": [draw(st.integers(1, 5))]},
    }


@settings(max_examples=1000, deadline=None)
@given(doc=monotone_tables(), record=records, factor=st.sampled_from(_BOOLEAN_FACTORS + _COUNT_FACTORS))
def test_scores_never_decrease_when_a_factor_worsens(doc, record, factor):
    table = load_table(doc)
    before = score(record, table)
    value = getattr(record, factor)
    worse = True if isinstance(value, bool) else value + 1
    after = score(_record(**{**record.to_dict(), factor: worse}), table)
    assert after.fta >= before.fta and after.nca >= before.nca and after.nvca >= before.nvca
    for output, (low, high) in table.ranges.items():
        assert low <= getattr(after, output) <= high


@settings(max_examples=200, deadline=None)
@given(rows=st.lists(records, min_size=1, max_size=30))
def test_vectorised_scores_match_scalar(rows, fixture_table):
    factors = {
        name: np.array([getattr(r, name) for r in rows]) for name in DefendantRecord.__dataclass_fields__
    }
    vector = score_arrays(factors, fixture_table)
    for idx, row in enumerate(rows):
        scalar = score(row, fixture_table)
        assert (vector["fta"][idx], vector["nca"][idx], vector["nvca"][idx]) == (
            scalar.fta,
            scalar.nca,
            scalar.nvca,
        )


def test_score_arrays_requires_all_factors(fixture_table):
    with pytest.raises(ValueError):
        score_arrays({"age_at_arrest": np.array([30])}, fixture_table)
