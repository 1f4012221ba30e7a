import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(Path(__file__).resolve().parent))

import oracles  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if oracles.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in oracles.RESULTS:
            terminalreporter.write_line(line)
