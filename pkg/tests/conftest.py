import json
from pathlib import Path

import pytest

from ppforge.cfg import Cfg, make_cfg, parse_cfg

GOLDEN = Path(__file__).parent / "golden"

BINSEARCH_NAMES = ["Start", "1", "2", "3", "4", "5", "6", "7", "8", "9", "End"]
BINSEARCH_ARCS = [("Start", "1"), ("1", "2"), ("2", "3"), ("2", "9"), ("3", "4"), ("3", "5"),
                  ("4", "8"), ("5", "6"), ("5", "7"), ("6", "8"), ("8", "2"), ("9", "End"),
                  ("7", "End")]


def split(*paths: str) -> set[tuple[str, ...]]:
    """'Start 1 2' -> ('Start', '1', '2')"""
    return {tuple(p.split()) for p in paths}


# the worked example, written out by hand
INTERNAL = split("4 8 2 3 5 6", "3 5 6 8 2 3", "2 3 5 6 8 2", "5 6 8 2 3 4", "8 2 3 5 6 8",
                 "6 8 2 3 5 6", "5 6 8 2 3 5", "4 8 2 3 4", "3 4 8 2 3", "2 3 4 8 2", "8 2 3 4 8")
COMPLETE = split("Start 1 2 9 End", "Start 1 2 3 5 7 End")
EXIT = split("3 5 6 8 2 9 End", "3 4 8 2 9 End", "4 8 2 3 5 7 End", "6 8 2 3 5 7 End")
ENTRY = split("Start 1 2 3 4 8", "Start 1 2 3 5 6 8")


@pytest.fixture
def binsearch() -> Cfg:
    return make_cfg(BINSEARCH_NAMES, BINSEARCH_ARCS, "Start", "End")


@pytest.fixture
def binsearch_file() -> Path:
    return GOLDEN / "binsearch.json"


def named(g: Cfg, paths) -> set[tuple[str, ...]]:
    return {tuple(g.label(p)) for p in paths}


def ids(g: Cfg, paths) -> set[tuple[int, ...]]:
    return {g.ids(p) for p in paths}


def load_golden(name: str) -> Cfg:
    return parse_cfg((GOLDEN / name).read_text())


def load_json(name: str):
    return json.loads((GOLDEN / name).read_text())


# acceptance criterion number -> (passed, detail); printed after the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
