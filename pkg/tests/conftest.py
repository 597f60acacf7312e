"""Shared test plumbing.

Collects one line per acceptance check and replays them as a block at
the end of the run, so the gate's verdicts are readable in one place.
"""

import pytest

_LINES: list[str] = []


@pytest.fixture(scope="session")
def record_line():
    """Append a PASS/FAIL line to the end-of-run acceptance report."""
    return _LINES.append


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _LINES:
        terminalreporter.section("acceptance checks")
        for line in _LINES:
            terminalreporter.write_line(line)
