import pytest

_LINES: list = []


@pytest.fixture
def criterion(capsys):
    """Record one pass/fail line for an acceptance criterion and assert it."""

    def record(num, ok, detail=""):
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        _LINES.append((num, line))
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
