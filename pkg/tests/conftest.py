"""Criterion bookkeeping for the acceptance suite.

Tests marked ``@pytest.mark.criterion(n, budget=seconds)`` are grouped by n;
at the end of the session one line per criterion is printed:

    CRITERION  1  PASS   3.21 s / 10 s  Galois laws

A criterion passes when all its tests pass and their summed call time stays
within the budget.
"""

from __future__ import annotations

import os
import sys
from collections import defaultdict

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_results: dict[int, dict] = defaultdict(lambda: {"outcomes": [], "time": 0.0, "budget": None, "title": ""})


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, budget, title): acceptance criterion n with a runtime budget in seconds")
    config.addinivalue_line("markers", "slow: takes more than a few seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    n = m.args[0]
    r = _results[n]
    r["budget"] = m.kwargs.get("budget")
    r["title"] = m.kwargs.get("title", "")
    if rep.when == "call":
        r["time"] += rep.duration
        r["outcomes"].append((item.nodeid, rep.outcome))
    elif rep.when == "setup" and rep.outcome != "passed":
        r["outcomes"].append((item.nodeid, rep.outcome))


def criterion_lines() -> list[str]:
    lines = []
    for n in sorted(_results):
        r = _results[n]
        ok = bool(r["outcomes"]) and all(o == "passed" for _, o in r["outcomes"])
        over = r["budget"] is not None and r["time"] > r["budget"]
        verdict = "PASS" if ok and not over else "FAIL"
        lines.append(f"CRITERION {n:2d}  {verdict}  {r['time']:7.2f} s / {r['budget']} s  {r['title']}")
        for nodeid, o in r["outcomes"]:
            if o != "passed":
                lines.append(f"    {o}: {nodeid}")
        if over:
            lines.append("    over the runtime budget")
    return lines


def pytest_terminal_summary(terminalreporter):
    lines = criterion_lines()
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
