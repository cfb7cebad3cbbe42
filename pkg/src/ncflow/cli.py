"""Command-line front end.

    ncflow run --scenario FILE [--out DIR] [--threads K] [--tolerance-scale F]
    ncflow analyze DIR [--delta-grid 0.5,1,1.5] [--out FILE] [--threads K]
    ncflow verify [SUITE] [--out DIR] [--tolerance-scale F]
    ncflow report DIR

Exit status: 0 success, 1 a certificate verdict or identity check failed,
2 usage or input error, 3 the flow hit an invariant violation.
"""

import argparse
import shutil
import sys
from dataclasses import dataclass
from pathlib import Path

from . import serialize, svg, verify
from .errors import NcflowError, ScenarioError, SnapshotError
from .flow import INVARIANT_VIOLATION, evolve
from .noncollapse import Certification, analyze, min_z, monotone_verdict
from .scenario import load_scenario, parse_scenario

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3

VERDICT_SERIES = (
    ("delta_interior", "non-decreasing"),
    ("delta_exterior", "non-decreasing"),
    ("delta_enclosure", "non-increasing"),
)


def verdicts_for(reports, slack, horizon=1.0, enabled=("delta_interior", "delta_exterior", "delta_enclosure")):
    """Monotonicity verdicts over reports with t <= horizon * (last t)."""
    if not reports:
        return {}
    T = reports[-1].t
    kept = [r for r in reports if r.t <= horizon * T] if T > 0 else reports
    return {name: monotone_verdict(name, [getattr(r, name) for r in kept], direction, slack)
            for name, direction in VERDICT_SERIES if name in enabled}


def _analysis_kwargs(scenario, threads):
    return dict(interior=scenario.interior, exterior=scenario.exterior, enclosure=scenario.enclosure,
                pinching=scenario.pinching, radii=scenario.radii, pruned=scenario.pruned,
                threads=threads)


def _enabled(scenario):
    return tuple(n for n, flag in (("delta_interior", scenario.interior),
                                   ("delta_exterior", scenario.exterior),
                                   ("delta_enclosure", scenario.enclosure)) if flag)


@dataclass
class RunResult:
    trajectory: object
    certification: Certification
    out: Path
    verify_failures: int = 0

    @property
    def status(self):
        if self.trajectory.reason == INVARIANT_VIOLATION:
            return EXIT_INVARIANT
        if not self.certification.ok or self.verify_failures:
            return EXIT_FAILED
        return EXIT_OK


def _summary_text(scenario, traj, cert, horizon_note):
    lines = [
        f"scenario: {scenario.name}",
        f"termination: {traj.reason} after {traj.steps} steps at t = {traj.final.t!r}",
    ]
    if traj.message:
        lines.append(f"message: {traj.message}")
    lines.append(f"snapshots: {len(traj)}")
    lines.append(horizon_note)
    for v in cert.verdicts.values():
        lines.append(f"{v.name:16s} {v.direction:15s} {'PASS' if v.ok else 'FAIL'}  "
                     f"worst excess {v.worst:.3e} at report {v.at}")
    final = cert.reports[-1]
    lines.append(f"final isoperimetric ratio: {final.isoperimetric!r}")
    if final.radius_ratio is not None:
        lines.append(f"final r_out/r_in: {final.radius_ratio!r}")
    return "\n".join(lines) + "\n"


def run_scenario(scenario, out=None, threads=1, tolerance_scale=1.0, scenario_text=None):
    """Evolve, certify and write every artifact of a scenario into `out`."""
    out = Path(out or scenario.output or Path("runs") / scenario.name)
    out.mkdir(parents=True, exist_ok=True)
    if scenario_text is not None:
        (out / "scenario.ini").write_text(scenario_text)
    traj = evolve(scenario)
    states = list(traj)
    reports = [analyze(s, **_analysis_kwargs(scenario, threads)) for s in states]
    cert = Certification(reports, verdicts_for(reports, scenario.slack, scenario.horizon,
                                               _enabled(scenario)))
    (out / "report.csv").write_text(serialize.reports_csv(reports))
    if scenario.snapshots:
        snap_dir = out / "snapshots"
        if snap_dir.exists():
            shutil.rmtree(snap_dir)
        snap_dir.mkdir()
        for k, s in enumerate(states):
            serialize.write_snapshot(s, snap_dir, k)
    if scenario.delta_grid:
        rows = [(s.t, m) for s in states for m in min_z(s, scenario.delta_grid)]
        (out / "min_z.csv").write_text(serialize.min_z_csv(rows))
    if scenario.svg:
        frames = out / "frames"
        if frames.exists():
            shutil.rmtree(frames)
        frames.mkdir()
        box = svg.trajectory_viewbox(states)
        for k in range(0, len(states), scenario.svg_every):
            (frames / f"frame_{k:05d}.svg").write_text(
                svg.render(states[k], reports[k], box, title=f"{scenario.name} t={states[k].t:.6g}"))
    note = f"verdict horizon: t <= {scenario.horizon:g} * {states[-1].t!r}"
    (out / "summary.txt").write_text(_summary_text(scenario, traj, cert, note))
    failures = 0
    if scenario.suite:
        results = verify.run_suite(scenario.suite, scenario.tolerance_scale * tolerance_scale)
        (out / "verify.csv").write_text(verify.residuals_csv(results))
        (out / "verify.txt").write_text(verify.summary(results) + "\n")
        failures = sum(not ok for _, ok, _ in results)
    return RunResult(traj, cert, out, failures)


def analyze_directory(directory, deltas=(), threads=1):
    """Recompute reports (and optional min-Z sweeps) from a run directory.

    Analysis options come from the directory's scenario.ini when present.
    """
    directory = Path(directory)
    states = serialize.read_snapshots(directory)
    kwargs = dict(threads=threads)
    ini = directory / "scenario.ini"
    if ini.is_file():
        sc = parse_scenario(ini.read_text(), source=str(ini))
        kwargs = _analysis_kwargs(sc, threads)
    reports = [analyze(s, **kwargs) for s in states]
    rows = [(s.t, m) for s in states for m in min_z(s, deltas)] if deltas else []
    return states, reports, rows


def _parse_grid(text):
    try:
        vals = tuple(float(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid delta grid {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty delta grid")
    return vals


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid value {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
        return v
    return conv


def build_parser():
    p = argparse.ArgumentParser(prog="ncflow", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="evolve a scenario, certify it and write artifacts")
    r.add_argument("--scenario", required=True, metavar="PATH")
    r.add_argument("--out", metavar="DIR")
    r.add_argument("--threads", type=_positive(int), default=1, metavar="K")
    r.add_argument("--tolerance-scale", type=_positive(float), default=1.0, metavar="F")

    a = sub.add_parser("analyze", help="recompute certificates from a run directory")
    a.add_argument("directory")
    a.add_argument("--delta-grid", type=_parse_grid, default=(), metavar="D1,D2,...")
    a.add_argument("--out", metavar="FILE", help="report CSV path (default: DIR/analysis.csv)")
    a.add_argument("--threads", type=_positive(int), default=1, metavar="K")

    v = sub.add_parser("verify", help="finite-difference identity checks")
    v.add_argument("suite", nargs="?", default="all",
                   help=f"all or one of {', '.join(verify.IDENTITIES)}")
    v.add_argument("--out", metavar="DIR")
    v.add_argument("--tolerance-scale", type=_positive(float), default=1.0, metavar="F")

    rep = sub.add_parser("report", help="summarize a run directory's report.csv")
    rep.add_argument("directory")
    rep.add_argument("--slack", type=float, default=None,
                     help="monotonicity slack (default: the run's scenario, else 1e-3)")
    return p


def _cmd_run(args):
    path = Path(args.scenario)
    scenario = load_scenario(path)
    result = run_scenario(scenario, args.out, args.threads, args.tolerance_scale,
                          scenario_text=path.read_text())
    sys.stdout.write((result.out / "summary.txt").read_text())
    if result.verify_failures:
        print(f"identity checks failed: {result.verify_failures}")
    if result.trajectory.reason == INVARIANT_VIOLATION:
        print(f"error: invariant violation: {result.trajectory.message}", file=sys.stderr)
    return result.status


def _cmd_analyze(args):
    _, reports, rows = analyze_directory(args.directory, args.delta_grid, args.threads)
    out = Path(args.out) if args.out else Path(args.directory) / "analysis.csv"
    out.write_text(serialize.reports_csv(reports))
    print(f"wrote {out} ({len(reports)} reports)")
    if rows:
        zpath = out.with_name(out.stem + "_min_z.csv")
        zpath.write_text(serialize.min_z_csv(rows))
        print(f"wrote {zpath}")
        for t, m in rows[-len(args.delta_grid):]:
            print(f"t={t:.6g} delta={m.delta:g} min Z={m.z:.6e} at ({m.x}, {m.y})")
    return EXIT_OK


def _cmd_verify(args):
    if args.suite != "all" and args.suite not in verify.IDENTITIES:
        print(f"error: unknown identity suite {args.suite!r}; choose from all, "
              f"{', '.join(verify.IDENTITIES)}", file=sys.stderr)
        return EXIT_USAGE
    results = verify.run_suite(args.suite, args.tolerance_scale)
    text = verify.residuals_csv(results)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "verify.csv").write_text(text)
        (out / "verify.txt").write_text(verify.summary(results) + "\n")
    print(verify.summary(results))
    failed = sum(not ok for _, ok, _ in results)
    print(f"{len(results)} checks, {failed} failed")
    return EXIT_FAILED if failed else EXIT_OK


def _cmd_report(args):
    path = Path(args.directory) / "report.csv"
    if not path.is_file():
        raise SnapshotError(f"{path}: not found")
    reports = serialize.read_reports_csv(path.read_text())
    if not reports:
        raise SnapshotError(f"{path}: no rows")
    cols = ("t", "delta_interior", "delta_exterior", "delta_enclosure", "H_max", "isoperimetric")
    print("  ".join(f"{c:>15s}" for c in cols))
    for r in reports:
        vals = [getattr(r, c) for c in cols]
        print("  ".join(f"{'-':>15s}" if v is None else f"{v:15.8g}" for v in vals))
    slack = args.slack
    horizon, enabled = 1.0, tuple(n for n, _ in VERDICT_SERIES)
    ini = Path(args.directory) / "scenario.ini"
    if ini.is_file():
        sc = parse_scenario(ini.read_text(), source=str(ini))
        slack = sc.slack if args.slack is None else args.slack
        horizon, enabled = sc.horizon, _enabled(sc)
    ok = True
    for v in verdicts_for(reports, 1e-3 if slack is None else slack, horizon, enabled).values():
        ok &= v.ok
        print(f"{v.name}: {v.direction} {'PASS' if v.ok else 'FAIL'} (worst excess {v.worst:.3e})")
    return EXIT_OK if ok else EXIT_FAILED


COMMANDS = {"run": _cmd_run, "analyze": _cmd_analyze, "verify": _cmd_verify, "report": _cmd_report}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ScenarioError, SnapshotError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NcflowError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
