"""Shared fixtures: the shipped sample problem and cached runs on it."""

from pathlib import Path

import pytest

from periodic_euler.config import load_config

ROOT = Path(__file__).resolve().parents[1]
SAMPLE = ROOT / "configs" / "sample.cfg"


@pytest.fixture(scope="session")
def sample_cfg():
    return load_config(SAMPLE, environ={})


@pytest.fixture(scope="session")
def sample_path():
    return SAMPLE


ACCEPTANCE = {}


def record(number: int, passed: bool, detail: str) -> bool:
    """Store the outcome of one acceptance criterion for the summary."""
    ACCEPTANCE[number] = (bool(passed), detail)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
