import pytest

VERDICTS = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance check and fail the test on FAIL."""

    def record(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} {criterion}: {detail}"
        VERDICTS.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
