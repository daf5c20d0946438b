import pytest

#: (criterion, passed, detail) lines printed after the run
CRITERIA: dict = {}


@pytest.fixture
def report():
    def _report(number: int, title: str, passed: bool, detail: str) -> None:
        CRITERIA[number] = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"

    return _report


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[number])
