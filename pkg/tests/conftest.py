import os

import pytest

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture
def data_dir():
    return DATA


ACCEPTANCE: dict = {}


def record(number: int, ok, detail: str = ""):
    """Store a criterion outcome; ok is True, False or None (skipped)."""
    status = "SKIPPED" if ok is None else ("PASS" if ok else "FAIL")
    ACCEPTANCE[number] = (status, detail)
    print(f"criterion {number:2d}: {status} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status} {detail}")
