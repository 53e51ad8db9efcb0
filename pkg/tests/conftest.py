import shutil
from pathlib import Path

import pytest

from patcheval.samples import load_dataset

FIXTURE_DATASET = Path(__file__).parent / "fixtures" / "dataset"
GOLDEN_DIR = Path(__file__).parent / "goldens"

needs_gcc = pytest.mark.skipif(shutil.which("gcc") is None, reason="gcc unavailable")


@pytest.fixture(scope="session")
def dataset_root() -> Path:
    return FIXTURE_DATASET


@pytest.fixture(scope="session")
def samples() -> dict:
    return {s.id: s for s in load_dataset(FIXTURE_DATASET)}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    results = {}
    for status in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            if getattr(rep, "when", "call") == "call" or status == "skipped":
                results[nodeid] = status
    if not results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("Acceptance criteria:")
    for nodeid, status in sorted(results.items()):
        label = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[status]
        terminalreporter.write_line(f"[{label}] {nodeid.split('::')[-1]}")
