"""Signed distance, enclosing circles and inscribed balls for planar regions.

The continuous boundary represented by a vertex polygon is taken to be the
periodic cubic spline through the vertices. Surfaces of revolution reduce to
their meridian section: the distance from a point at radius rho to the surface
equals the planar distance from (rho, z) to the profile.
"""

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import Voronoi, cKDTree

_SAMPLES_PER_EDGE = 8
_CANDIDATES = 6


class SplineBoundary:
    """Closed counterclockwise spline through polygon vertices, with signed distance."""

    def __init__(self, polygon, samples_per_edge=_SAMPLES_PER_EDGE):
        P = np.asarray(polygon, dtype=float)
        closed = np.vstack([P, P[:1]])
        u = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(closed, axis=0), axis=1))])
        self.period = u[-1]
        self.spline = CubicSpline(u, closed, bc_type="periodic")
        self.d1 = self.spline.derivative(1)
        self.d2 = self.spline.derivative(2)
        k = samples_per_edge
        frac = np.arange(k) / k
        self.u = (u[:-1, None] + frac[None, :] * np.diff(u)[:, None]).ravel()
        self.samples = self.spline(self.u)
        self._tree = cKDTree(self.samples)

    def _project(self, p):
        """Spline parameter of the closest boundary point, and the dense-polyline distance.

        Every candidate segment is refined by Newton's method, so near-ties
        between separate arcs are decided on the spline itself rather than on
        the polyline, whose chord error can exceed the gap between them.
        """
        S = self.samples
        m = len(S)
        _, idx = self._tree.query(p, k=_CANDIDATES)
        seg = np.concatenate([idx, (idx - 1) % m], axis=1)
        a = S[seg]
        d = S[(seg + 1) % m] - a
        q = p[:, None, :]
        t = np.clip(np.sum((q - a) * d, axis=2) / np.sum(d * d, axis=2), 0.0, 1.0)
        chord = np.linalg.norm(a + t[..., None] * d - q, axis=2)
        best_d = chord.min(axis=1)
        u0 = self.u[seg]
        u1 = np.where(seg + 1 < m, self.u[(seg + 1) % m], self.period)
        u = (u0 + t * (u1 - u0)).ravel()
        P = np.repeat(p, seg.shape[1], axis=0)
        h = self.period / m
        for _ in range(4):
            s, s1, s2 = self.spline(u), self.d1(u), self.d2(u)
            r = s - P
            g = np.einsum("ij,ij->i", r, s1)
            gp = np.einsum("ij,ij->i", s1, s1) + np.einsum("ij,ij->i", r, s2)
            step = np.where(gp > 0, g / np.where(gp > 0, gp, 1.0), 0.0)
            u = u - np.clip(step, -h, h)
        dist = np.linalg.norm(self.spline(u) - P, axis=1).reshape(seg.shape)
        k = np.argmin(dist, axis=1)
        u = u.reshape(seg.shape)[np.arange(len(p)), k] % self.period
        return u, best_d, h

    def signed_distance(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        u, best_d, h = self._project(p)
        s, s1 = self.spline(u), self.d1(u)
        r = p - s
        dist = np.linalg.norm(r, axis=1)
        # Newton can only fail far from the curve; fall back to the polyline there
        dist = np.where(np.abs(dist - best_d) <= 1e-3 * (best_d + h), dist, best_d)
        outward = np.einsum("ij,ij->i", r, np.column_stack([s1[:, 1], -s1[:, 0]]))
        return np.where(outward <= 0, dist, -dist)

    def frame(self, points):
        """Outward unit normal and curvature (positive where convex) at the closest boundary points."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        u, _, _ = self._project(p)
        s1, s2 = self.d1(u), self.d2(u)
        speed = np.linalg.norm(s1, axis=1)
        normal = np.column_stack([s1[:, 1], -s1[:, 0]]) / speed[:, None]
        kappa = (s1[:, 0] * s2[:, 1] - s1[:, 1] * s2[:, 0]) / speed**3
        return normal, kappa


def meridian_section(profile, closed):
    """The closed meridian curve of a surface of revolution (profile plus its mirror)."""
    if closed:
        return profile
    mirror = profile[-2:0:-1] * [-1.0, 1.0]
    return np.vstack([profile, mirror])


# -- minimal enclosing circle ------------------------------------------------

def _circle_two(a, b):
    c = 0.5 * (a + b)
    return c, float(np.linalg.norm(a - c))


def _circle_three(a, b, c):
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-300:
        pts = [a, b, c]
        best = max(((p, q) for i, p in enumerate(pts) for q in pts[i + 1:]),
                   key=lambda pq: np.linalg.norm(pq[0] - pq[1]))
        return _circle_two(*best)
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    center = np.array([ux, uy])
    return center, float(max(np.linalg.norm(a - center), np.linalg.norm(b - center), np.linalg.norm(c - center)))


def minimal_enclosing_circle(points, seed=0):
    """Welzl's algorithm (iterative, randomized order with a fixed seed)."""
    P = np.asarray(points, dtype=float)
    P = P[np.random.default_rng(seed).permutation(len(P))]
    eps = 1e-12

    def inside(c, r, p):
        return np.linalg.norm(p - c) <= r * (1 + eps) + eps

    c, r = P[0].copy(), 0.0
    for i in range(1, len(P)):
        if inside(c, r, P[i]):
            continue
        c, r = P[i].copy(), 0.0
        for j in range(i):
            if inside(c, r, P[j]):
                continue
            c, r = _circle_two(P[i], P[j])
            for k in range(j):
                if not inside(c, r, P[k]):
                    c, r = _circle_three(P[i], P[j], P[k])
    r = float(np.max(np.linalg.norm(P - c, axis=1)))
    return c, r


# -- maximal inscribed ball --------------------------------------------------

def medial_seeds(samples, lo, hi):
    """Voronoi vertices of dense boundary samples within the box [lo, hi].

    They approximate the medial axis, so the largest inscribed ball is
    centred near one of them.
    """
    V = Voronoi(np.asarray(samples, dtype=float)).vertices
    return V[np.all((V >= lo) & (V <= hi), axis=1)]


_STENCIL = np.array([(i, j) for i in range(-2, 3) for j in range(-2, 3) if i or j], dtype=float) / 2


def pattern_search(dist, x0, step, tol=1e-12, max_calls=500):
    """Local maximization of a (possibly non-smooth) function of two variables.

    Evaluates a 5x5 stencil around the incumbent in one vectorized call,
    moves to the best strictly better point and halves the step otherwise.
    """
    x = np.asarray(x0, dtype=float)
    v = float(dist(x[None, :])[0])
    for _ in range(max_calls):
        if step <= tol:
            break
        cand = x + step * _STENCIL
        vals = dist(cand)
        k = int(np.argmax(vals))
        if vals[k] > v:
            x, v = cand[k], float(vals[k])
        else:
            step *= 0.5
    return x, v


def maximize_distance(dist, lo, hi, grid=64, starts=3, seeds=None, step=None):
    """Maximize a signed-distance function over a box.

    Candidates are a coarse grid plus optional `seeds`; the best `starts`
    of them are refined by `pattern_search` with initial step `step`
    (default: the grid spacing). Returns (center, value).
    """
    xs = np.linspace(lo[0], hi[0], grid)
    ys = np.linspace(lo[1], hi[1], grid)
    G = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
    if seeds is not None and len(seeds):
        G = np.vstack([G, seeds])
    vals = dist(G)
    order = np.argsort(-vals, kind="stable")[:starts]
    size = max(hi[0] - lo[0], hi[1] - lo[1])
    step = step or size / grid
    best_c, best_v = G[order[0]], float(vals[order[0]])
    for k in order:
        c, v = pattern_search(dist, G[k], step, tol=1e-12 * size)
        if v > best_v:
            best_c, best_v = c, v
    return np.asarray(best_c), best_v
