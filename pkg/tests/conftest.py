"""Shared fixtures, hypothesis profile, and acceptance-line reporting.

The acceptance tests register one human-readable PASS/FAIL line per
criterion; the lines are echoed in a dedicated terminal section after the
run so the verdicts are visible regardless of pytest's capture settings.
"""

from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from timelens import TimeGrid

settings.register_profile(
    "ci",
    max_examples=30,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.filter_too_much],
)
settings.load_profile("ci")


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    """Collect a criterion verdict for the end-of-run summary."""
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def small_grid() -> TimeGrid:
    """A fast grid fine enough for 5 ps features and ~30 ps² of dispersion."""
    return TimeGrid.centered(window=400.0, n_samples=2**12)


@pytest.fixture
def fine_grid() -> TimeGrid:
    """A longer window for spectral-width measurements (fine dω)."""
    return TimeGrid.centered(window=2000.0, n_samples=2**14)
