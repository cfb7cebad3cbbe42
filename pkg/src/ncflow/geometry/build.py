"""Construction of discrete geometries from shape descriptors.

A descriptor is a mapping (or keyword arguments) with a ``shape`` key and the
shape's parameters, e.g. ``build(shape="ellipse", a=2, b=1, N=512)``.
Analytic shapes are sampled uniformly in arclength with vertices exactly on
the curve.
"""

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from ..errors import GeometryError
from .axisym import AxisymmetricSurface, _open_resample
from .curve import DiscreteCurve, check_polygon_simple, periodic_resample, polygon_area

CURVE_SHAPES = ("circle", "ellipse", "fourier_star", "polygon")
SURFACE_SHAPES = ("sphere", "ellipsoid", "torus", "profile")
SHAPES = CURVE_SHAPES + SURFACE_SHAPES

_PARAMS = {
    "circle": {"R": 1.0},
    "ellipse": {"a": 2.0, "b": 1.0},
    "fourier_star": {"coefficients": ((3, 0.3),), "base": 1.0},
    "polygon": {"points": None},
    "sphere": {"R": 1.0},
    "ellipsoid": {"a": 1.0, "c": 1.0},
    "torus": {"R0": 2.0, "r0": 0.5},
    "profile": {"points": None, "topology": "sphere"},
}


def _polar_radius(coefficients, base):
    coeffs = [tuple(c) for c in coefficients]

    def r(t):
        out = np.full_like(t, base, dtype=float)
        for c in coeffs:
            k, a = c[0], c[1]
            b = c[2] if len(c) > 2 else 0.0
            out = out + a * np.cos(k * t) + b * np.sin(k * t)
        return out

    def dr(t):
        out = np.zeros_like(t, dtype=float)
        for c in coeffs:
            k, a = c[0], c[1]
            b = c[2] if len(c) > 2 else 0.0
            out = out - a * k * np.sin(k * t) + b * k * np.cos(k * t)
        return out

    return r, dr


def parametrization(shape, **p):
    """(point(t), speed(t), t0, t1, closed) for analytic shapes; points are planar
    (x, y) for curves and meridian (r, z) for surfaces of revolution."""
    if shape == "circle":
        R = p["R"]
        return (lambda t: np.column_stack([R * np.cos(t), R * np.sin(t)]),
                lambda t: np.full_like(t, R), 0.0, 2 * np.pi, True)
    if shape == "ellipse":
        a, b = p["a"], p["b"]
        return (lambda t: np.column_stack([a * np.cos(t), b * np.sin(t)]),
                lambda t: np.hypot(a * np.sin(t), b * np.cos(t)), 0.0, 2 * np.pi, True)
    if shape == "fourier_star":
        r, dr = _polar_radius(p["coefficients"], p["base"])
        return (lambda t: np.column_stack([r(t) * np.cos(t), r(t) * np.sin(t)]),
                lambda t: np.hypot(r(t), dr(t)), 0.0, 2 * np.pi, True)
    if shape == "sphere":
        R = p["R"]
        return (lambda t: np.column_stack([R * np.cos(t), R * np.sin(t)]),
                lambda t: np.full_like(t, R), -np.pi / 2, np.pi / 2, False)
    if shape == "ellipsoid":
        a, c = p["a"], p["c"]
        return (lambda t: np.column_stack([a * np.cos(t), c * np.sin(t)]),
                lambda t: np.hypot(a * np.sin(t), c * np.cos(t)), -np.pi / 2, np.pi / 2, False)
    if shape == "torus":
        R0, r0 = p["R0"], p["r0"]
        return (lambda t: np.column_stack([R0 + r0 * np.cos(t), r0 * np.sin(t)]),
                lambda t: np.full_like(t, r0), 0.0, 2 * np.pi, True)
    raise GeometryError(f"shape {shape!r} has no analytic parametrization")


def arclength_parameters(speed, t0, t1, N, closed):
    """Parameter values splitting [t0, t1] into pieces of equal arclength."""
    K = max(64 * N, 1 << 14)
    t = np.linspace(t0, t1, K + 1)
    s = cumulative_simpson(speed(t), x=t, initial=0.0)
    targets = s[-1] * np.arange(N) / (N if closed else N - 1)
    theta = CubicSpline(s, t)(targets)
    theta[0] = t0
    if not closed:
        theta[-1] = t1
    return theta


def _normalize(descriptor, kwargs):
    d = dict(descriptor or {})
    d.update(kwargs)
    shape = d.pop("shape", None)
    if shape not in SHAPES:
        raise GeometryError(f"unknown shape {shape!r}; expected one of {', '.join(SHAPES)}")
    N = int(d.pop("N", 512))
    M = int(d.pop("M", 64))
    params = dict(_PARAMS[shape])
    unknown = set(d) - set(params)
    if unknown:
        raise GeometryError(f"unknown parameters for {shape}: {sorted(unknown)}")
    params.update(d)
    for k, v in params.items():
        if v is None:
            raise GeometryError(f"{shape} requires parameter {k!r}")
    for k in ("R", "a", "b", "c", "R0", "r0"):
        if k in params and not float(params[k]) > 0:
            raise GeometryError(f"{shape}: parameter {k} must be positive")
    if shape == "torus" and params["r0"] >= params["R0"]:
        raise GeometryError("torus requires r0 < R0")
    return shape, N, M, params


def sample(descriptor=None, **kwargs):
    """Like `build`, but also returns the parameter value of every vertex
    (None for point-list shapes)."""
    shape, N, M, p = _normalize(descriptor, kwargs)
    if shape == "polygon":
        P = np.asarray(p["points"], dtype=float)
        check_polygon_simple(P)
        if polygon_area(P) < 0:
            P = P[::-1]
        V, _ = periodic_resample(P, N)
        g = DiscreteCurve(V)
        g.check_simple()
        return g, None
    if shape == "profile":
        P = np.asarray(p["points"], dtype=float)
        topo = p["topology"]
        check_polygon_simple(P, closed=topo == "torus")
        if topo == "torus":
            if polygon_area(P) < 0:
                P = P[::-1]
            V, _ = periodic_resample(P, N)
        else:
            if P[0, 1] > P[-1, 1]:
                P = P[::-1]
            V, _ = _open_resample(P, N, None)
        g = AxisymmetricSurface(V, topo, M)
        g.check_simple()
        return g, None
    point, speed, t0, t1, closed = parametrization(shape, **p)
    theta = arclength_parameters(speed, t0, t1, N, closed)
    V = point(theta)
    if shape in CURVE_SHAPES:
        g = DiscreteCurve(V)
    else:
        if not closed:
            V[0, 0] = V[-1, 0] = 0.0
        g = AxisymmetricSurface(V, "torus" if closed else "sphere", M)
    g.check_simple()
    return g, theta


def build(descriptor=None, **kwargs):
    """Discretize a shape descriptor into a DiscreteCurve or AxisymmetricSurface.

    Raises SelfIntersectionError (naming the first offending segment pair) if
    the resulting polygon is not simple.
    """
    return sample(descriptor, **kwargs)[0]


def analytic_for(descriptor=None, **kwargs):
    """The AnalyticSurface matching an analytic shape descriptor."""
    from . import analytic

    shape, _, _, p = _normalize(descriptor, kwargs)
    if shape == "circle":
        return analytic.circle(p["R"])
    if shape == "ellipse":
        return analytic.ellipse(p["a"], p["b"])
    if shape == "fourier_star":
        return analytic.fourier_star(p["coefficients"], p["base"])
    if shape == "sphere":
        return analytic.sphere(p["R"])
    if shape == "ellipsoid":
        return analytic.ellipsoid(p["a"], p["c"])
    if shape == "torus":
        return analytic.torus(p["R0"], p["r0"])
    raise GeometryError(f"shape {shape!r} has no analytic counterpart")
