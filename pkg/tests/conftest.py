import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

# Filled by the acceptance tests: (criterion, passed, detail).
VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in sorted(VERDICTS):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
