"""Shared fixtures: seeded generators and the acceptance report."""

from __future__ import annotations

import random

import pytest

_LINES: list[str] = []


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture
def report():
    """Record one verdict line; the lines are repeated in the terminal summary."""

    def add(line: str) -> None:
        print(line)
        _LINES.append(line)

    return add


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
