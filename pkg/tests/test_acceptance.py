"""End-to-end acceptance: one test per criterion, each printing a PASS/FAIL line.

The whole pipeline runs once through ``run_verification`` (the code behind
``flexpoly verify``); each test reports its criterion from that run.
"""
import time

import pytest

from flexpoly.config import RunConfig
from flexpoly.verify import NAMES, report_json, run_verification


@pytest.fixture(scope="module")
def run():
    t0 = time.perf_counter()
    report = run_verification(RunConfig())
    return report, time.perf_counter() - t0


@pytest.mark.parametrize("number", sorted(NAMES))
def test_criterion(run, number, capsys):
    report, _ = run
    crit = next(c for c in report["criteria"] if c["criterion"] == number)
    line = report["lines"][number - 1]
    with capsys.disabled():
        print("\n" + line)
    assert crit["passed"], line


def test_runtime_budget(run, capsys):
    _, seconds = run
    with capsys.disabled():
        print(f"\n[{'PASS' if seconds < 120 else 'FAIL'}] full verification in {seconds:.1f} s (budget 120 s)")
    assert seconds < 120


def test_report_deterministic(run):
    report, _ = run
    assert report_json(run_verification(RunConfig())) == report_json(report)
