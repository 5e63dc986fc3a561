"""Shared fixtures and the acceptance-criteria summary."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    cid, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _RESULTS[cid] = (title, "PASS" if rep.outcome == "passed" else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_RESULTS, key=lambda s: int(s)):
        title, res = _RESULTS[cid]
        terminalreporter.write_line(f"criterion {cid}: {res}  {title}")


class SoftChecks:
    """Collects named sub-checks so every part of a criterion is evaluated."""

    def __init__(self):
        self.rows = []

    def __call__(self, name: str, ok: bool, detail: str = ""):
        self.rows.append((name, bool(ok), detail))
        return ok

    def close(self):
        lines = [f"  {'ok  ' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in self.rows]
        report = "\n".join(lines)
        print(report)
        assert all(ok for _, ok, _ in self.rows), "failed sub-checks:\n" + report


@pytest.fixture
def checks():
    return SoftChecks()
