"""Closed, positively oriented plane polygons approximating smooth curves."""

from functools import cached_property

import numpy as np
import shapely
from scipy.interpolate import CubicSpline

from ..errors import DegenerateSpacingError, GeometryError, SelfIntersectionError
from . import stencil
from .fields import VertexFields

MIN_VERTICES = 8
REMESH_RATIO = 3.0
_DENSE = 8


def _readonly(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def polygon_area(P):
    x, y = P[:, 0], P[:, 1]
    return 0.5 * float(x[:-1] @ y[1:] - x[1:] @ y[:-1] + x[-1] * y[0] - x[0] * y[-1])


def _prev(a):
    return np.concatenate((a[-1:], a[:-1]))


def _next(a):
    return np.concatenate((a[1:], a[:1]))


def _simple_fast(P, closed):
    """GEOS simplicity test; only a failing polygon goes through the exact pair search."""
    coords = np.vstack([P, P[:1]]) if closed else P
    return shapely.is_simple(shapely.linestrings(coords))


def segments_intersections(A, B, allowed_adjacent, chunk=256):
    """Return the lexicographically first pair (i, j), i < j, of intersecting segments.

    Segment k runs from A[k] to B[k]. `allowed_adjacent(i, j)` marks pairs that
    share an endpoint by construction and are skipped.
    """
    n = len(A)
    for start in range(0, n, chunk):
        i = np.arange(start, min(start + chunk, n))[:, None]
        j = np.arange(n)[None, :]
        p1, p2 = A[i], B[i]
        q1, q2 = A[j], B[j]
        d1 = stencil.cross2(p2 - p1, q1 - p1)
        d2 = stencil.cross2(p2 - p1, q2 - p1)
        d3 = stencil.cross2(q2 - q1, p1 - q1)
        d4 = stencil.cross2(q2 - q1, p2 - q1)
        hit = (d1 * d2 <= 0) & (d3 * d4 <= 0)
        # collinear disjoint segments satisfy the sign test trivially; reject by bbox
        lo_p, hi_p = np.minimum(p1, p2), np.maximum(p1, p2)
        lo_q, hi_q = np.minimum(q1, q2), np.maximum(q1, q2)
        hit &= np.all((lo_p <= hi_q) & (lo_q <= hi_p), axis=-1)
        hit &= j > i
        hit &= ~allowed_adjacent(i, j)
        if hit.any():
            rows, cols = np.nonzero(hit)
            k = np.lexsort((cols, rows))[0]
            return int(i[rows[k], 0]), int(cols[k])
    return None


def check_polygon_simple(P, closed=True):
    """Raise SelfIntersectionError naming the first pair of crossing edges of a point list."""
    P = np.asarray(P, dtype=float)
    if len(P) < 3 or _simple_fast(P, closed):
        return
    A = P if closed else P[:-1]
    B = np.roll(P, -1, axis=0) if closed else P[1:]
    m = len(A)

    def adjacent(i, j):
        same = (j == i) | (j == i + 1)
        return same | ((i == 0) & (j == m - 1)) if closed else same

    hit = segments_intersections(A, B, adjacent)
    if hit is None:
        raise SelfIntersectionError(-1, -1, message="point list is not simple (touching vertices)")
    raise SelfIntersectionError(*hit, message=f"edges {hit[0]} and {hit[1]} of the point list intersect")


def periodic_resample(P, N, extra=None):
    """Resample a closed polyline at N points uniform in spline arclength.

    Vertex 0 is kept as the arclength origin. `extra` is an optional (K, m)
    array of per-vertex scalars carried along by the same spline parameter.
    """
    closed = np.vstack([P, P[:1]])
    u = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(closed, axis=0), axis=1))])
    spline = CubicSpline(u, closed, bc_type="periodic")
    uu = np.linspace(0.0, u[-1], _DENSE * len(P) + 1)
    dense = spline(uu)
    cum = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(dense, axis=0), axis=1))])
    targets = cum[-1] * np.arange(N) / N
    u_new = np.interp(targets, cum, uu)
    out = spline(u_new)
    if extra is None:
        return out, None
    ex = np.asarray(extra, dtype=float)
    ex_closed = np.concatenate([ex, ex[:1]], axis=0)
    return out, CubicSpline(u, ex_closed, bc_type="periodic")(u_new)


class DiscreteCurve:
    """Simple closed polygon, counterclockwise, outward normal on the right of the tangent."""

    kind = "curve"
    n = 1
    ambient = 2

    def __init__(self, vertices, check_simple=False):
        V = np.array(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 2:
            raise GeometryError(f"expected (N, 2) vertices, got shape {V.shape}")
        if len(V) < MIN_VERTICES:
            raise GeometryError(f"need at least {MIN_VERTICES} vertices, got {len(V)}")
        if not np.all(np.isfinite(V)):
            raise GeometryError("non-finite vertex coordinates")
        E = _next(V) - V
        seg = np.hypot(E[:, 0], E[:, 1])
        bad = np.nonzero(seg <= 1e-14 * max(seg.max(), 1e-300))[0]
        if len(bad):
            raise DegenerateSpacingError(bad[0])
        if polygon_area(V) <= 0:
            raise GeometryError("vertices must be ordered counterclockwise (signed area <= 0)")
        self._v = _readonly(V)
        self._edges = E
        self._seg = _readonly(seg)
        if check_simple:
            self.check_simple()

    @property
    def vertices(self):
        return self._v

    @property
    def N(self):
        return len(self._v)

    def __repr__(self):
        return f"DiscreteCurve(N={self.N}, area={self.area():.6g})"

    # -- measures -------------------------------------------------------
    def spacing(self):
        """Length of the edge from vertex i to vertex i + 1."""
        return self._seg

    def spacing_ratio(self):
        s = self.spacing()
        return float(s.max() / s.min())

    def mean_spacing(self):
        return float(self.spacing().mean())

    def area(self):
        return polygon_area(self._v)

    def length(self):
        return float(self.spacing().sum())

    def enclosed_measure(self):
        return self.area()

    def boundary_measure(self):
        return self.length()

    def isoperimetric_ratio(self):
        return self.length() ** 2 / (4.0 * np.pi * self.area())

    def centroid(self):
        return self._v.mean(axis=0)

    def min_spacing(self):
        return float(self.spacing().min())

    # -- differential quantities -----------------------------------------
    @cached_property
    def _fields(self):
        # same formulas as the stencil module, written out to reuse edge data
        e2 = self._edges
        e1 = _prev(e2)
        b = self._seg
        a = _prev(b)
        chord = e1 + e2
        c = np.hypot(chord[:, 0], chord[:, 1])
        kappa = 2.0 * stencil.cross2(e1, e2) / (a * b * c)
        T = (a * a)[:, None] * e2 + (b * b)[:, None] * e1
        T /= np.hypot(T[:, 0], T[:, 1])[:, None]
        nu = np.column_stack([T[:, 1], -T[:, 0]])
        H = kappa
        Hp, Hn = _prev(H), _next(H)
        dH = stencil.first_derivative(Hp, H, Hn, a, b)
        lapH = stencil.second_derivative(Hp, H, Hn, a, b)
        return VertexFields(
            position=self._v,
            normal=nu,
            tangent=T,
            H=H,
            principal=kappa[:, None],
            A2=kappa**2,
            grad_H=dH,
            lap_H=lapH,
        )

    def fields(self):
        return self._fields

    def laplacian(self, u):
        """Arclength second difference of a per-vertex scalar."""
        u = np.asarray(u, dtype=float)
        b = self._seg
        return stencil.second_derivative(_prev(u), u, _next(u), _prev(b), b)

    def diffusion_limit(self):
        """Largest dt keeping the explicit arclength Laplacian step monotone."""
        a = self._seg
        return 0.5 * float(np.min(a * _prev(a)))

    # -- invariants -------------------------------------------------------
    def check_simple(self):
        V = self._v
        n = len(V)
        if _simple_fast(V, True):
            return

        def adjacent(i, j):
            return (j == i) | (j == i + 1) | ((i == 0) & (j == n - 1))

        hit = segments_intersections(V, _next(V), adjacent)
        if hit is None:
            raise SelfIntersectionError(-1, -1, message="polygon is not simple (touching vertices)")
        raise SelfIntersectionError(*hit, message=f"segments {hit[0]} and {hit[1]} intersect")

    # -- transformations --------------------------------------------------
    def moved(self, displacement):
        return DiscreteCurve(self._v + displacement)

    def transformed(self, scale=1.0, rotation=None, shift=(0.0, 0.0)):
        V = self._v * scale
        if rotation is not None:
            V = V @ np.asarray(rotation).T
        return DiscreteCurve(V + np.asarray(shift))

    def remesh(self, extra=None, N=None, preserve_area=True):
        """Uniform-arclength resampling; returns (curve, resampled extra)."""
        N = N or self.N
        area = self.area()
        P, ex = periodic_resample(self._v, N, extra)
        out = DiscreteCurve(P)
        if preserve_area:
            for _ in range(2):
                eps = (area - out.area()) / out.length()
                out = DiscreteCurve(out.vertices + eps * out.fields().normal)
        return out, ex

    def needs_remesh(self, ratio=REMESH_RATIO):
        return self.spacing_ratio() > ratio

    # -- noncollapse plumbing ---------------------------------------------
    def pair_sources(self):
        f = self.fields()
        return self._v, f.normal, np.arange(self.N)

    def pair_targets(self):
        """Target points and, per target, the source index it coincides with (-1 if none)."""
        return self._v, np.arange(self.N)

    @cached_property
    def boundary(self):
        """The spline interpolant through the vertices (a SplineBoundary)."""
        from .region import SplineBoundary

        return SplineBoundary(self._v)

    def region_distance(self, points):
        return self.boundary.signed_distance(points)

    def boundary_frame(self, points):
        """Outward normal and curvature of the continuous boundary at the points nearest `points`."""
        return self.boundary.frame(points)
