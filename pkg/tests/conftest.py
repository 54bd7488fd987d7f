from __future__ import annotations

import functools
from pathlib import Path

import pytest

from somm.events import to_rel_structure
from somm.litmus import build_event_structure, parse_file

ROOT = Path(__file__).resolve().parent.parent
LITMUS_DIR = ROOT / "litmus"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def corpus_paths() -> list:
    return sorted(LITMUS_DIR.glob("*.lisa"))


@functools.lru_cache(maxsize=None)
def built(name: str):
    """Event structure and relational encoding of ``litmus/<name>.lisa``, cached per session."""
    es = build_event_structure(parse_file(LITMUS_DIR / f"{name}.lisa"))
    return es, to_rel_structure(es)


@pytest.fixture
def litmus_dir() -> Path:
    return LITMUS_DIR


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
