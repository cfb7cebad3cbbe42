"""On-disk formats: JSON snapshot records and the certificate CSV.

Run directory layout::

    <out>/scenario.ini              copy of the scenario
    <out>/snapshots/snapshot_NNNNN.json
    <out>/report.csv                one row per snapshot (REPORT_COLUMNS)
    <out>/min_z.csv                 optional delta sweep (MIN_Z_COLUMNS)
    <out>/frames/frame_NNNNN.svg
    <out>/summary.txt               monotonicity verdicts and termination

Snapshot records hold the vertex coordinates (planar points for curves,
meridian (r, z) points for surfaces of revolution) with Python's shortest
round-trip float repr, so a geometry read back is bit-identical.

Report CSV conventions: floats use repr; +inf is written ``inf``; an absent
value (e.g. no enclosing certificate) is an empty cell. Extremal pairs are
``x:y``, ``x:diag`` for the coincident-pair limit at x, or empty when there
is no constraint.
"""

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import GeometryError, SnapshotError
from .flow import FlowState
from .geometry import AxisymmetricSurface, DiscreteCurve
from .noncollapse import DIAGONAL, NoncollapseReport

FORMAT = "ncflow-snapshot"
VERSION = 1
SNAPSHOT_GLOB = "snapshot_*.json"

REPORT_COLUMNS = (
    "t", "delta_interior", "delta_exterior", "delta_enclosure", "pinch_min", "pinch_min_exterior",
    "r_in", "r_out", "H_min", "H_max", "isoperimetric", "radius",
    "argmin_interior", "argmin_exterior", "argmin_enclosure", "f_mode",
)
CERTIFICATE_COLUMNS = (
    "delta_interior", "delta_exterior", "delta_enclosure",
    "argmin_interior", "argmin_exterior", "argmin_enclosure",
)
MIN_Z_COLUMNS = ("t", "delta", "min_z", "x", "y")


# -- geometry and snapshots ----------------------------------------------------------------

def geometry_record(geometry):
    rec = {"kind": geometry.kind, "vertices": geometry.vertices.tolist()}
    if geometry.kind == "axisym":
        rec["topology"] = geometry.topology
        rec["M"] = geometry.M
    return rec


def geometry_from_record(rec):
    kind = rec.get("kind")
    V = np.array(rec["vertices"], dtype=float)
    if kind == "curve":
        return DiscreteCurve(V)
    if kind == "axisym":
        return AxisymmetricSurface(V, rec["topology"], rec["M"])
    raise GeometryError(f"unknown geometry kind {kind!r}")


GEOMETRY_HEADER = "ncflow-geometry"


def geometry_text(geometry):
    """Plain text: a header line with type and flags, then one ``x y`` (or ``r z``) vertex per line."""
    head = [GEOMETRY_HEADER, f"version={VERSION}", f"kind={geometry.kind}"]
    if geometry.kind == "axisym":
        head += [f"topology={geometry.topology}", f"M={geometry.M}"]
    lines = [" ".join(head)]
    lines += [f"{float(a)!r} {float(b)!r}" for a, b in geometry.vertices]
    return "\n".join(lines) + "\n"


def geometry_from_text(text, source="<geometry>"):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split()[0] != GEOMETRY_HEADER:
        raise SnapshotError(f"{source}: missing {GEOMETRY_HEADER!r} header line")
    try:
        flags = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
        rec = {"kind": flags.get("kind"),
               "vertices": [[float(v) for v in ln.split()] for ln in lines[1:]]}
        if rec["kind"] == "axisym":
            rec["topology"] = flags["topology"]
            rec["M"] = int(flags["M"])
        if any(len(v) != 2 for v in rec["vertices"]):
            raise ValueError("expected two coordinates per vertex line")
        return geometry_from_record(rec)
    except (ValueError, KeyError, GeometryError) as exc:
        raise SnapshotError(f"{source}: corrupt geometry ({exc})") from None


def save_geometry(geometry, path):
    Path(path).write_text(geometry_text(geometry))


def load_geometry(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SnapshotError(f"{path}: cannot read geometry ({exc.strerror})") from None
    return geometry_from_text(text, str(path))


def snapshot_record(state, index=None):
    F = state.geometry.fields()
    return {
        "format": FORMAT,
        "version": VERSION,
        "index": index,
        "t": float(state.t),
        "step": int(state.step),
        "remesh_count": int(state.remesh_count),
        "geometry": geometry_record(state.geometry),
        "H": F.H.tolist(),
        "f": None if state.f is None else np.asarray(state.f, dtype=float).tolist(),
    }


def state_from_record(rec):
    if rec.get("format") != FORMAT:
        raise ValueError(f"not a snapshot record (format {rec.get('format')!r})")
    g = geometry_from_record(rec["geometry"])
    f = None if rec.get("f") is None else np.array(rec["f"], dtype=float)
    return FlowState(g, float(rec["t"]), int(rec["step"]), f, int(rec.get("remesh_count", 0)))


def snapshot_name(index):
    return f"snapshot_{index:05d}.json"


def write_snapshot(state, directory, index):
    path = Path(directory) / snapshot_name(index)
    path.write_text(json.dumps(snapshot_record(state, index)) + "\n")
    return path


def read_snapshot(path):
    path = Path(path)
    try:
        rec = json.loads(path.read_text())
        return state_from_record(rec)
    except OSError as exc:
        raise SnapshotError(f"{path}: cannot read ({exc.strerror})") from None
    except (ValueError, KeyError, TypeError, GeometryError) as exc:
        raise SnapshotError(f"{path}: corrupt snapshot ({exc})") from None


def read_snapshots(directory):
    """All snapshots of a run directory (or of its snapshots/ subdirectory), in index order."""
    d = Path(directory)
    if not d.is_dir():
        raise SnapshotError(f"{d}: no such directory")
    if (d / "snapshots").is_dir():
        d = d / "snapshots"
    files = sorted(d.glob(SNAPSHOT_GLOB))
    if not files:
        raise SnapshotError(f"{d}: no snapshot files ({SNAPSHOT_GLOB})")
    return [read_snapshot(p) for p in files]


# -- report CSV -----------------------------------------------------------------------------

def format_float(v):
    if v is None:
        return ""
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def parse_float(s):
    s = s.strip()
    if s == "":
        return None
    return float(s)


def format_pair(pair):
    x, y = pair
    if x < 0:
        return ""
    return f"{x}:diag" if y == DIAGONAL else f"{x}:{y}"


def parse_pair(s):
    s = s.strip()
    if not s:
        return (-1, -1)
    x, y = s.split(":")
    return (int(x), DIAGONAL if y == "diag" else int(y))


def report_row(r):
    return [
        format_float(r.t), format_float(r.delta_interior), format_float(r.delta_exterior),
        format_float(r.delta_enclosure), format_float(r.pinch_min_interior),
        format_float(r.pinch_min_exterior), format_float(r.r_in), format_float(r.r_out),
        format_float(r.H_min), format_float(r.H_max), format_float(r.isoperimetric),
        format_float(r.radius), format_pair(r.argmin_interior), format_pair(r.argmin_exterior),
        format_pair(r.argmin_enclosure), "1" if r.f_mode else "0",
    ]


def reports_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in reports:
        w.writerow(report_row(r))
    return buf.getvalue()


def read_reports_csv(text):
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != REPORT_COLUMNS:
        raise ValueError(f"unexpected report CSV columns {reader.fieldnames}")
    out = []
    for row in reader:
        out.append(NoncollapseReport(
            t=parse_float(row["t"]),
            delta_interior=parse_float(row["delta_interior"]),
            argmin_interior=parse_pair(row["argmin_interior"]),
            delta_exterior=parse_float(row["delta_exterior"]),
            argmin_exterior=parse_pair(row["argmin_exterior"]),
            delta_enclosure=parse_float(row["delta_enclosure"]),
            argmin_enclosure=parse_pair(row["argmin_enclosure"]),
            pinch_min_interior=parse_float(row["pinch_min"]),
            pinch_min_exterior=parse_float(row["pinch_min_exterior"]),
            r_in=parse_float(row["r_in"]),
            r_out=parse_float(row["r_out"]),
            H_min=parse_float(row["H_min"]),
            H_max=parse_float(row["H_max"]),
            isoperimetric=parse_float(row["isoperimetric"]),
            f_mode=row["f_mode"] == "1",
            radius=parse_float(row["radius"]),
        ))
    return out


def certificate_columns(text):
    """Only the certificate columns of a report CSV, as a list of tuples of strings."""
    return [tuple(row[c] for c in CERTIFICATE_COLUMNS) for row in csv.DictReader(io.StringIO(text))]


def min_z_csv(rows):
    """rows: iterable of (t, MinZ)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MIN_Z_COLUMNS)
    for t, m in rows:
        w.writerow([format_float(t), format_float(m.delta), format_float(m.z), m.x, m.y])
    return buf.getvalue()
