"""Shared fixtures and the acceptance-criteria summary hook."""

import numpy as np
import pytest

# One line per acceptance criterion, printed in the terminal summary so the
# verdicts are visible even though pytest captures stdout during the tests.
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append((number, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_LINES):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status} — {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240824)
