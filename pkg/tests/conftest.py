import os

import pytest

from sparsity_lab import budget

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(autouse=True)
def _clean_budget(monkeypatch):
    # runs must not depend on the caller's environment
    monkeypatch.delenv(budget.ENV_VAR, raising=False)
    yield


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    if os.environ.get("ACCEPTANCE_ECHO"):
        print(line)
