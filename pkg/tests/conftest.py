import json
from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_DIR = DATA_DIR / "fixture"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def golden_normalize_cases() -> list[dict]:
    return json.loads((DATA_DIR / "normalize_golden.json").read_text(encoding="utf-8"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per release criterion (tests in test_acceptance.py)."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid or getattr(report, "when", "call") != "call":
                continue
            name = nodeid.split("::")[-1].removeprefix("test_").replace("_", " ")
            lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in lines:
            terminalreporter.write_line(f"{status}  {name}")
