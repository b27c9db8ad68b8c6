import pytest

_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion.

    Usage: ``ok = criterion(k, passed, detail)`` then assert on ``ok``.
    """
    def record(k, passed, detail):
        line = f"criterion {k:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        _LINES.append((k, line))
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES, key=lambda kv: str(kv[0]).zfill(3)):
            terminalreporter.write_line(line)
