# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：conftest.py
@Description：公共 fixture（夹具文件路径、评分表、事件流）
"""

from datetime import date
from pathlib import Path

import pytest

from scoring.events import read_events
from scoring.table import load_fixture_table

FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def fixture_table():
    return load_fixture_table()


@pytest.fixture(scope="session")
def fixture_events():
    return read_events(FIXTURE_DIR / "events_fixture.jsonl")


@pytest.fixture(scope="session")
def fixture_as_of() -> date:
    return date(2024, 6, 15)
