import pytest

_CRITERIA = {}


@pytest.fixture
def record():
    """Register the outcome of one acceptance criterion for the end-of-run summary."""

    def _record(number, title, ok, detail=""):
        _CRITERIA[number] = (title, ok, detail)
        print(f"[criterion {number:>2}] {'PASS' if ok else 'FAIL'}  {title}  {detail}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[number]
        status = "PASS" if ok is True else ("ADVISORY" if ok is None else "FAIL")
        terminalreporter.write_line(f"{number:>2}. {status:<8} {title}: {detail}")
