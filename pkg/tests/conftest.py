import pytest

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture(scope="session")
def record():
    """Store one summary line per acceptance criterion."""
    def _record(number, passed, text):
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {text}"
        _ACCEPTANCE[number] = line
        print(line)
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[n])
