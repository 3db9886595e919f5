import sys
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cptloc import make_grid  # noqa: E402

_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def grid720():
    return make_grid(1, 720)


@pytest.fixture(scope="session")
def fine_grid():
    return make_grid(1, 7200)


@pytest.fixture
def criterion():
    """Record one acceptance criterion's outcome and runtime for the summary."""

    @contextmanager
    def record(number, title):
        start = time.perf_counter()
        entry = {"title": title, "ok": False, "seconds": None}
        _ACCEPTANCE[number] = entry
        try:
            yield entry
            entry["ok"] = True
        finally:
            if entry["seconds"] is None:
                entry["seconds"] = time.perf_counter() - start

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[number]
        verdict = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {e['title']}  ({e['seconds']:.3g} s)")
