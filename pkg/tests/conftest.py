import sys
import pathlib

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from corpus import from_doc, golden_doc  # noqa: E402

_verdicts = pytest.StashKey[dict]()


@pytest.fixture
def fig1():
    return from_doc(golden_doc())


@pytest.fixture
def fig1_doc():
    return golden_doc()


@pytest.fixture
def verdict(request):
    """Record a pass/fail line for an acceptance criterion."""
    log = request.config.stash.setdefault(_verdicts, {})

    def record(criterion: int, ok: bool, detail: str) -> bool:
        log[criterion] = (ok, detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(_verdicts, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(log):
        ok, detail = log[criterion]
        terminalreporter.write_line(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")
