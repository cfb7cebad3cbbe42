import dataclasses
import time
from pathlib import Path

import pytest

from ncflow.cli import run_scenario
from ncflow.flow import evolve
from ncflow.noncollapse import analyze
from ncflow.scenario import load_scenario

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"
SUITE_BUDGET = 600.0

# (criterion, ok, detail) lines printed at the end of the session
ACCEPTANCE = []
_START = {}


def pytest_sessionstart(session):
    _START["t"] = time.perf_counter()


def _elapsed():
    return time.perf_counter() - _START.get("t", time.perf_counter())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    ok = _elapsed() <= SUITE_BUDGET
    tr.write_line(f"{'PASS' if ok else 'FAIL'}  9b suite wall time: {_elapsed():.1f} s "
                  f"(budget {SUITE_BUDGET:.0f} s)")


def pytest_sessionfinish(session, exitstatus):
    # the wall-time budget is part of the acceptance contract, so overrunning fails the run
    if ACCEPTANCE and _elapsed() > SUITE_BUDGET and exitstatus == 0:
        session.exitstatus = 1


@pytest.fixture(scope="session")
def record():
    """Register one acceptance line; returns `ok` so tests can assert on it."""
    def _record(name, ok, detail):
        ACCEPTANCE.append((name, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        return ok
    return _record


@dataclasses.dataclass
class TimedRun:
    result: object          # ncflow.cli.RunResult
    seconds: float
    scenario: object

    @property
    def trajectory(self):
        return self.result.trajectory

    @property
    def reports(self):
        return self.result.certification.reports

    @property
    def out(self):
        return self.result.out


@pytest.fixture(scope="session")
def scenario_run(tmp_path_factory):
    """Run a bundled scenario through the full pipeline once per session."""
    cache = {}

    def get(name):
        if name not in cache:
            path = SCENARIOS / f"{name}.ini"
            sc = load_scenario(path)
            out = tmp_path_factory.mktemp(name)
            t0 = time.perf_counter()
            res = run_scenario(sc, out, scenario_text=path.read_text())
            cache[name] = TimedRun(res, time.perf_counter() - t0, sc)
        return cache[name]
    return get


@pytest.fixture(scope="session")
def circle_f_run():
    """The circle baseline with the f field started at f0 = H."""
    sc = dataclasses.replace(load_scenario(SCENARIOS / "circle-baseline.ini"), f0="H")
    traj = evolve(sc)
    return traj, [analyze(s, exterior=False, enclosure=False, radii=False) for s in traj]
