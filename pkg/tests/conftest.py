import pytest

# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def acceptance_line():
    def record(number, passed, detail, seconds, budget):
        ok = passed and seconds < budget
        line = (f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}  "
                f"[{seconds:.2f}s of {budget:g}s]")
        ACCEPTANCE_LINES[number] = line
        print(line)
        return ok

    return record
