import pytest

_LINES = []


@pytest.fixture
def criterion_line():
    """Record one acceptance line; it is echoed now and again in the terminal summary."""

    def record(number, passed, text, seconds):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {text}  [{seconds:.2f} s]"
        _LINES.append((number, line))
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_LINES):
        terminalreporter.write_line(line)
