import csv
import io
import subprocess
import sys
from pathlib import Path

import pytest

from ncflow import serialize
from ncflow.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"

SMALL = """\
[scenario]
name = small-ellipse

[geometry]
shape = ellipse
a = 2
b = 1
N = 64

[flow]
t_end = 0.3
snapshot_dt = 0.05

[analysis]
delta_grid = 0.2, 0.5
"""


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    ini = root / "small.ini"
    ini.write_text(SMALL)
    out = root / "run"
    assert main(["run", "--scenario", str(ini), "--out", str(out)]) == EXIT_OK
    return ini, out


def test_run_writes_every_artifact(small_run):
    _, out = small_run
    for name in ("scenario.ini", "report.csv", "min_z.csv", "summary.txt"):
        assert (out / name).is_file()
    snaps = sorted((out / "snapshots").glob("*.json"))
    frames = sorted((out / "frames").glob("*.svg"))
    reports = serialize.read_reports_csv((out / "report.csv").read_text())
    assert len(snaps) == len(frames) == len(reports) >= 6
    assert "PASS" in (out / "summary.txt").read_text()


def test_analyze_reproduces_the_certificate_columns(small_run, tmp_path):
    _, out = small_run
    target = tmp_path / "again.csv"
    assert main(["analyze", str(out), "--out", str(target), "--delta-grid", "0.2,0.5"]) == EXIT_OK
    a = serialize.certificate_columns((out / "report.csv").read_text())
    b = serialize.certificate_columns(target.read_text())
    assert a == b
    z = (tmp_path / "again_min_z.csv").read_text()
    assert z == (out / "min_z.csv").read_text()


def test_run_is_deterministic(small_run, tmp_path):
    ini, out = small_run
    assert main(["run", "--scenario", str(ini), "--out", str(tmp_path / "b")]) == EXIT_OK
    assert (tmp_path / "b" / "report.csv").read_bytes() == (out / "report.csv").read_bytes()


def test_report(small_run, capsys):
    _, out = small_run
    assert main(["report", str(out)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "delta_interior: non-decreasing PASS" in text


def test_empty_scenario_gives_one_report(tmp_path):
    assert main(["run", "--scenario", str(SCENARIOS / "empty.ini"), "--out", str(tmp_path)]) == EXIT_OK
    assert len(serialize.read_reports_csv((tmp_path / "report.csv").read_text())) == 1


def test_min_z_sign_on_the_circle(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[geometry]\nshape = circle\nN = 128\n[flow]\nt_end = 0\n"
                   "[analysis]\ndelta_grid = 0.5, 1.0, 1.5\n")
    assert main(["run", "--scenario", str(ini), "--out", str(tmp_path / "o")]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO((tmp_path / "o" / "min_z.csv").read_text())))
    z = {float(r["delta"]): float(r["min_z"]) for r in rows}
    assert z[0.5] >= 0 and abs(z[1.0]) < 1e-12 and z[1.5] < 0


def test_usage_errors(tmp_path, capsys):
    assert main(["verify", "Zq"]) == EXIT_USAGE
    assert "unknown identity suite" in capsys.readouterr().err
    assert main(["analyze", str(tmp_path)]) == EXIT_USAGE
    assert main(["report", str(tmp_path)]) == EXIT_USAGE
    bad = tmp_path / "bad.ini"
    bad.write_text("[geometry]\nshape = circle\nsize = 2\n[flow]\nt_end = 1\n")
    assert main(["run", "--scenario", str(bad)]) == EXIT_USAGE
    assert "bad.ini:3" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == 2


def test_verify_single_suite(tmp_path):
    assert main(["verify", "NormalIdentity", "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "verify.csv").is_file()
    # an absurdly tight tolerance makes the same checks fail
    assert main(["verify", "NormalIdentity", "--tolerance-scale", "1e-12"]) == EXIT_FAILED


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "ncflow.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "analyze" in r.stdout
