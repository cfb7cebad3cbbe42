"""Plain SVG 1.1 frames: outline colored by H plus the touching balls at the extremal pair.

Surfaces of revolution are drawn as their meridian section (r, z) mirrored
across the axis. All frames of a trajectory share one viewBox in world
coordinates (see `trajectory_viewbox`) so that they can be compared directly.
"""

from xml.sax.saxutils import escape

import numpy as np

from .noncollapse import DIAGONAL

# blue -> white -> red
_STOPS = np.array([[0.23, 0.30, 0.75], [0.87, 0.87, 0.87], [0.71, 0.02, 0.15]])


def color(s):
    """Hex color for s in [0, 1] on a diverging blue-white-red ramp."""
    s = float(np.clip(s, 0.0, 1.0)) * 2
    k = min(int(s), 1)
    c = _STOPS[k] + (s - k) * (_STOPS[k + 1] - _STOPS[k])
    r, g, b = (int(round(255 * v)) for v in c)
    return f"#{r:02x}{g:02x}{b:02x}"


def section(geometry):
    """Closed planar outline: the curve itself or the mirrored meridian profile."""
    if geometry.kind == "curve":
        return geometry.vertices, np.arange(geometry.N)
    P = geometry.profile
    idx = np.arange(len(P))
    if geometry.closed:
        return P, idx
    mirror = P[-2:0:-1] * [-1.0, 1.0]
    return np.vstack([P, mirror]), np.concatenate([idx, idx[-2:0:-1]])


def trajectory_viewbox(states, margin=0.1):
    """(x0, y0, width, height) covering every snapshot, with a relative margin."""
    pts = np.vstack([section(s.geometry)[0] for s in states])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    size = float(np.max(hi - lo)) or 1.0
    pad = margin * size
    return (float(lo[0] - pad), float(lo[1] - pad), float(hi[0] - lo[0] + 2 * pad),
            float(hi[1] - lo[1] + 2 * pad))


def _touching_circle(geometry, F, weight, x, delta, side):
    """Center and radius (in the drawing plane) of the ball of radius delta/w(x) tangent at x."""
    r = float(delta / weight[x])
    sign = -1.0 if side == "interior" else 1.0
    return geometry.vertices[x] + sign * r * F.normal[x], r


def _target_point(geometry, y):
    if geometry.kind == "curve":
        return geometry.vertices[y], 0
    _, prof, az = geometry.realize()
    return geometry.profile[int(prof[y])], int(az[y])


def render(state, report=None, viewbox=None, width=480, title=None):
    """SVG text for one snapshot. `report` supplies the extremal pairs to mark."""
    g = state.geometry
    F = g.fields()
    P, idx = section(g)
    viewbox = viewbox or trajectory_viewbox([state])
    x0, y0, w, h = viewbox
    stroke = 0.004 * max(w, h)
    H = F.H
    lo, hi = float(H.min()), float(H.max())
    scale = (H - lo) / (hi - lo) if hi > lo else np.full_like(H, 0.5)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{int(round(width * h / w))}" viewBox="{x0!r} {-(y0 + h)!r} {w!r} {h!r}">',
        f"<title>{escape(title or f't = {state.t:.6g}')}</title>",
        '<g transform="scale(1,-1)" fill="none" stroke-linecap="round">',
    ]
    n = len(P)
    for k in range(n):
        a, b = P[k], P[(k + 1) % n]
        c = color(0.5 * (scale[idx[k]] + scale[idx[(k + 1) % n]]))
        out.append(f'<line x1="{a[0]:.6g}" y1="{a[1]:.6g}" x2="{b[0]:.6g}" y2="{b[1]:.6g}" '
                   f'stroke="{c}" stroke-width="{stroke:.4g}"/>')
    if report is not None:
        weight = state.f if report.f_mode else H
        for side, delta, pair, col in (
            ("interior", report.delta_interior, report.argmin_interior, "#1a7f37"),
            ("exterior", report.delta_exterior, report.argmin_exterior, "#8250df"),
        ):
            x, y = pair
            if delta is None or not np.isfinite(delta) or x < 0:
                continue
            c, r = _touching_circle(g, F, weight, x, delta, side)
            out.append(f'<circle cx="{c[0]:.6g}" cy="{c[1]:.6g}" r="{r:.6g}" stroke="{col}" '
                       f'stroke-width="{0.6 * stroke:.4g}" stroke-dasharray="{3 * stroke:.4g}"/>')
            X = g.vertices[x]
            out.append(f'<circle cx="{X[0]:.6g}" cy="{X[1]:.6g}" r="{1.5 * stroke:.4g}" fill="{col}"/>')
            if y != DIAGONAL:
                Y, _ = _target_point(g, y)
                out.append(f'<circle cx="{Y[0]:.6g}" cy="{Y[1]:.6g}" r="{1.5 * stroke:.4g}" '
                           f'fill="none" stroke="{col}" stroke-width="{0.6 * stroke:.4g}"/>')
    out.append("</g>")
    fs = 0.035 * h
    label = f"t = {state.t:.6g}   H in [{lo:.4g}, {hi:.4g}]"
    if report is not None and report.delta_interior is not None:
        label += f"   delta* = {report.delta_interior:.6g}"
    out.append(f'<text x="{x0 + 0.02 * w:.6g}" y="{-(y0 + h) + 1.2 * fs:.6g}" font-size="{fs:.4g}" '
               f'font-family="monospace">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
