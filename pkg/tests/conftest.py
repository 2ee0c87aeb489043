import pytest

from hyperlab import experiments

ACCEPTANCE_LINES: list[str] = []
_HITTING = {"trials": 0, "violations": 0}


@pytest.fixture(scope="session", autouse=True)
def _count_hitting_records():
    original = experiments.HittingRecord.__post_init__

    def counting(self):
        _HITTING["trials"] += 1
        if not 1 <= self.tau_i <= self.tau_c:
            _HITTING["violations"] += 1
        original(self)

    experiments.HittingRecord.__post_init__ = counting
    yield
    experiments.HittingRecord.__post_init__ = original


@pytest.fixture
def hitting_tally():
    return _HITTING


@pytest.fixture
def criterion():
    """Record a pass/fail line for the end-of-session acceptance report, then assert."""

    def check(number: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail

    return check


def pytest_terminal_summary(terminalreporter):
    tally = _HITTING
    if not ACCEPTANCE_LINES and not tally["trials"]:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    ok = tally["violations"] == 0
    terminalreporter.write_line(
        f"[{'PASS' if ok else 'FAIL'}] criterion 2 (suite-wide): tau_i <= tau_c on "
        f"{tally['trials'] - tally['violations']}/{tally['trials']} in-process hitting trials"
    )
