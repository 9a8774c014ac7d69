import pytest

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


class Criterion:
    def __init__(self):
        self.number = None

    def start(self, number: int, title: str):
        self.number = number
        ACCEPTANCE_RESULTS[number] = (False, title)

    def passed(self, detail: str = ""):
        _, title = ACCEPTANCE_RESULTS[self.number]
        ACCEPTANCE_RESULTS[self.number] = (True, f"{title} {detail}".rstrip())


@pytest.fixture
def criterion():
    return Criterion()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, summary = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {summary}")
