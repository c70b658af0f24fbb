from __future__ import annotations

import re

import pytest

from flexigen.config import load_example_config

_ACCEPTANCE = re.compile(r"test_acceptance\.py::test_c(\d+)_(\w+)")
_results: dict[int, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def example_cfg():
    return load_example_config()


def pytest_runtest_logreport(report):
    m = _ACCEPTANCE.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        prev = _results.get(n, ("PASS", ""))[0]
        outcome = "PASS" if report.outcome == "passed" and prev == "PASS" else "FAIL"
        _results[n] = (outcome, m.group(2).replace("_", " "))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        outcome, name = _results[n]
        terminalreporter.write_line(f"C{n:<2} {outcome}  {name}")
