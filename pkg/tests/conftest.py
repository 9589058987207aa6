import pytest

# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}
N_CRITERIA = 11


@pytest.fixture
def criterion():
    """Record a criterion's verdict: ``criterion(n, ok, detail)`` then assert it."""

    def record(number: int, ok: bool, detail: str = ""):
        ACCEPTANCE[number] = ("PASS" if ok else "FAIL", detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    reports = terminalreporter.stats.get("passed", []) + terminalreporter.stats.get("failed", [])
    ran = [r for r in reports if "test_acceptance" in r.nodeid]
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for number in range(1, N_CRITERIA + 1):
        # a criterion whose test raised before recording counts as failed
        verdict, detail = ACCEPTANCE.get(number, ("FAIL", "did not complete"))
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {detail}")
