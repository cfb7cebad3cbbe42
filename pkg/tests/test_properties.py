import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from ncflow.flow import initial_state
from ncflow.geometry import DiscreteCurve, build
from ncflow.noncollapse import (
    ENCLOSURE,
    EXTERIOR,
    INTERIOR,
    PairSearch,
    touching_ball_check,
)

FAST = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])

# aspect ratio <= 3 keeps the vertex spacing well below the smallest curvature radius
ellipses = st.builds(lambda a, q: dict(shape="ellipse", a=a, b=a * q),
                     st.floats(0.5, 3.0), st.floats(1 / 3, 3.0))
# r = 1 + a cos k t is convex for a < 1 / (k^2 - 1); stay at half of that
stars = st.builds(lambda k, q: dict(shape="fourier_star", coefficients=[(k, q / (k * k - 1))]),
                  st.integers(2, 5), st.floats(0.0, 0.5))
convex = st.one_of(ellipses, stars)
# clearly non-convex stars (at least twice the convexity limit) exercise the exterior certificate
wavy = st.builds(lambda k, q: dict(shape="fourier_star", coefficients=[(k, q * 2 / (k * k - 1))]),
                 st.integers(3, 4), st.floats(1.0, 1.12))


def _moved(g, angle, shift, scale=1.0):
    c, s = np.cos(angle), np.sin(angle)
    R = np.array([[c, -s], [s, c]])
    return DiscreteCurve(scale * g.vertices @ R.T + shift)


def _certificates(state):
    search = PairSearch(state)
    return [search.search(m).value for m in (INTERIOR, EXTERIOR, ENCLOSURE)]


def _same(a, b):
    # dimensionless values, compared to 1e-12 (relative above 1)
    for u, v in zip(a, b):
        if u is None or v is None or not np.isfinite(u):
            assert u == v
        else:
            assert abs(u - v) <= 1e-12 * max(1.0, abs(u))


def _states(shape, moved):
    """H-weighted states for convex shapes, support-weighted ones otherwise; f moves with the curve."""
    g = build(shape, N=96)
    h, factor = moved(g)
    if g.fields().H.min() > 0:
        return g, h
    f = np.einsum("ij,ij->i", g.vertices, g.fields().normal)
    return initial_state(g, f), initial_state(h, f / factor)


@FAST
@given(st.one_of(convex, wavy), st.floats(0, 2 * np.pi),
       st.tuples(st.floats(-5, 5), st.floats(-5, 5)))
def test_certificates_are_rigid_invariant(shape, angle, shift):
    a, b = _states(shape, lambda g: (_moved(g, angle, np.array(shift)), 1.0))
    _same(_certificates(a), _certificates(b))


@FAST
@given(st.one_of(convex, wavy), st.floats(0.05, 20.0))
def test_certificates_are_scale_invariant(shape, lam):
    a, b = _states(shape, lambda g: (_moved(g, 0.0, np.zeros(2), lam), lam))
    _same(_certificates(a), _certificates(b))


@FAST
@given(convex, st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=2, max_size=6))
def test_region_distance_is_1_lipschitz(shape, pts):
    g = build(shape, N=128)
    P = np.array(pts, dtype=float)
    d = g.region_distance(P)
    for i in range(len(P)):
        for j in range(i + 1, len(P)):
            assert abs(d[i] - d[j]) <= np.linalg.norm(P[i] - P[j]) + 1e-9


def _on_curve(shape, t):
    if shape["shape"] == "ellipse":
        return np.c_[shape["a"] * np.cos(t), shape["b"] * np.sin(t)]
    (k, amp), = shape["coefficients"]
    r = 1 + amp * np.cos(k * t)
    return np.c_[r * np.cos(t), r * np.sin(t)]


@FAST
@given(convex, st.integers(0, 2**31 - 1))
def test_remesh_preserves_area(shape, seed):
    rng = np.random.default_rng(seed)
    # unevenly spaced parameters, vertices exactly on the curve
    t = np.sort(rng.uniform(0, 2 * np.pi, 160))
    t = t[np.diff(t, append=t[0] + 2 * np.pi) > 1e-3]
    uneven = DiscreteCurve(_on_curve(shape, t))
    out, _ = uneven.remesh()
    assert abs(out.area() / uneven.area() - 1) <= 1e-6


@FAST
@given(st.one_of(convex, wavy))
def test_pruned_search_equals_exhaustive(shape):
    g = build(shape, N=96)
    # the support function is a positive weight on every star-shaped curve
    s = initial_state(g, np.einsum("ij,ij->i", g.vertices, g.fields().normal))
    search = PairSearch(s)
    for mode in (INTERIOR, EXTERIOR, ENCLOSURE):
        a, b = search.search(mode), search.search(mode, pruned=True)
        assert (a.value, a.pair()) == (b.value, b.pair())


@FAST
@given(convex, st.floats(0.3, 1.7), st.integers(0, 10**6))
def test_touching_ball_agrees_with_sign_of_min_z(shape, frac, seed):
    g = build(shape, N=256)
    F = g.fields()
    X = g.vertices
    x = seed % g.N
    D = X - X[x]
    inner = D @ F.normal[x]
    keep = inner < 0
    thr = min(float(np.min(F.H[x] * np.sum(D[keep] ** 2, axis=1) / (-2 * inner[keep]))),
              float(F.H[x] / F.lam_max[x]))
    delta = frac * thr
    if abs(delta / thr - 1) <= 1e-6:
        return
    assert touching_ball_check(g, x, delta).inside == (delta <= thr)
