"""Collects per-criterion verdicts from the acceptance suite and prints them."""

import pytest

VERDICTS = []


@pytest.fixture
def record():
    def _record(label, ok, detail=""):
        VERDICTS.append((label, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in VERDICTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
