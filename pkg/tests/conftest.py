import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one pass/fail line for an acceptance criterion."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(number, passed, detail):
        status = "PASS" if passed else "FAIL"
        lines.append((number, f"criterion {number:>2}: {status}  {detail}"))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
