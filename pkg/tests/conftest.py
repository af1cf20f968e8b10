"""Shared pytest wiring: acceptance criteria get one summary line each."""
import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Log one 'criterion NN: PASS/FAIL - detail' line, then assert."""

    def _record(num: int, ok: bool, detail: str) -> None:
        verdict = "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES.append(f"criterion {num:02d}: {verdict} - {detail}")
        assert ok, f"criterion {num:02d} failed: {detail}"

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
