"""The two-point function Z and the non-collapsing certificates derived from it.

For a source vertex x with outward normal nu_x, weight H_x (or f_x in f-field
mode) and a target point y,

    Z(x, y) = H_x / 2 * |X(y) - X(x)|^2 + delta * <X(y) - X(x), nu_x>.

Z >= 0 for all pairs exactly when every interior tangent ball of radius
delta / H_x avoids the hypersurface. Solving Z = 0 for delta gives the pair
ratios H d^2 / (-2 <D, nu>) whose extrema are the certificates. The
coincident-pair limit y -> x contributes H / lambda_max (interior),
H / (-lambda_min) (exterior) and H / lambda_min (enclosure).

For surfaces of revolution the sources are the meridian vertices (every other
vertex is a rotated copy) and the targets are all points of the 3D
realization, so y indexes `geometry.pair_targets()`.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import NotMeanConvexError
from .geometry import inradius_circumradius

INTERIOR = "interior"
EXTERIOR = "exterior"
ENCLOSURE = "enclosure"
MODES = (INTERIOR, EXTERIOR, ENCLOSURE)

DIAGONAL = -1
_CHUNK_ELEMENTS = 1 << 20
_LEAF_SIZE = 64
_BOUND_SAFETY = 1e-9


# -- snapshot access ---------------------------------------------------------

def _unpack(state, use_f=None):
    """(geometry, fields, weight, use_f) for a FlowState or a bare geometry."""
    geometry = getattr(state, "geometry", state)
    f = getattr(state, "f", None)
    if use_f is None:
        use_f = f is not None
    F = geometry.fields().with_f(f)
    return geometry, F, F.weight(use_f), use_f


def _state_time(state):
    return float(getattr(state, "t", 0.0))


# -- Z at a single pair ------------------------------------------------------

@dataclass(frozen=True)
class ZEvaluation:
    x: int
    y: int
    d: float
    w: np.ndarray
    inner: float
    H: float
    delta: float
    z: float

    def recompute(self):
        return 0.5 * self.H * self.d * self.d + self.delta * self.inner


def z_value(state, x, y, delta, use_f=None):
    """Evaluate Z at the pair (source x, target y)."""
    geometry, _, weight, _ = _unpack(state, use_f)
    X, nu, _ = geometry.pair_sources()
    Y, tsrc = geometry.pair_targets()
    x, y = int(x), int(y)
    if tsrc[y] == x:
        raise ValueError(f"x = y (vertex {x}): Z vanishes on the diagonal; use the diagonal limit")
    D = Y[y] - X[x]
    d = float(np.linalg.norm(D))
    if d == 0.0:
        raise ValueError(f"target {y} coincides with source {x}")
    inner = float(D @ nu[x])
    H = float(weight[x])
    z = 0.5 * H * d * d + delta * inner
    return ZEvaluation(x, y, d, D / d, inner, H, float(delta), z)


# -- pair kernels ------------------------------------------------------------

def _terms(X, nu, Y):
    """Squared chord lengths and normal components, rows = sources, cols = targets.

    Written componentwise so that any subset of rows/cols reproduces the
    full-matrix values bit for bit.
    """
    d2 = 0.0
    inner = 0.0
    for k in range(X.shape[1]):
        D = Y[None, :, k] - X[:, k, None]
        d2 = d2 + D * D
        inner = inner + D * nu[:, k, None]
    return d2, inner


def _ratios(mode, w, d2, inner, diag):
    """Pair ratios; excluded pairs are +inf for min-modes and -inf for enclosure."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if mode == INTERIOR:
            r = np.where(inner < 0, w[:, None] * d2 / (-2.0 * inner), np.inf)
        elif mode == EXTERIOR:
            r = np.where(inner > 0, w[:, None] * d2 / (2.0 * inner), np.inf)
        else:
            r = np.where(inner < 0, w[:, None] * d2 / (-2.0 * inner), -np.inf)
    r[diag] = np.inf if mode != ENCLOSURE else -np.inf
    return r


@dataclass(frozen=True)
class Extremum:
    """An extremal certificate value and where it is attained.

    `y == DIAGONAL` marks the coincident-pair limit at vertex x; `x == -1`
    means no constraint exists (value is +inf) or, for the enclosure, that it
    is absent (value is None).
    """

    value: Optional[float]
    x: int
    y: int

    @property
    def on_diagonal(self):
        return self.y == DIAGONAL and self.x >= 0

    def pair(self):
        return (self.x, self.y)


def _better(mode, v, xy, best_v, best_xy):
    if mode == ENCLOSURE:
        return v > best_v or (v == best_v and xy < best_xy)
    return v < best_v or (v == best_v and xy < best_xy)


class PairSearch:
    """Extremal pair ratios over all (source, target) pairs of one snapshot.

    `exhaustive` evaluates every pair in row-major chunks; `pruned` runs a
    branch and bound over a bounding-box tree of the targets. Both return the
    same value and the lexicographically first extremal pair.
    """

    def __init__(self, state, use_f=None):
        geometry, F, weight, use_f = _unpack(state, use_f)
        self.geometry = geometry
        self.fields = F
        self.use_f = use_f
        self.w = np.asarray(weight, dtype=float)
        self.X, self.nu, _ = geometry.pair_sources()
        self.Y, self.tsrc = geometry.pair_targets()
        self._leaves = None

    # diagonal limits ---------------------------------------------------
    def diagonal(self, mode):
        lam_max, lam_min = self.fields.lam_max, self.fields.lam_min
        w = self.w
        with np.errstate(divide="ignore", invalid="ignore"):
            if mode == INTERIOR:
                v = np.where(lam_max > 0, w / lam_max, np.inf)
            elif mode == EXTERIOR:
                v = np.where(lam_min < 0, w / -lam_min, np.inf)
            else:
                if np.any(lam_min <= 0):
                    return Extremum(None, -1, DIAGONAL)
                v = w / lam_min
        i = int(np.argmax(v) if mode == ENCLOSURE else np.argmin(v))
        if not np.isfinite(v[i]):
            return Extremum(float("inf"), -1, DIAGONAL)
        return Extremum(float(v[i]), i, DIAGONAL)

    @staticmethod
    def _combine(mode, diag, pair):
        """Pairs win over the diagonal limit only on strict improvement."""
        if mode == ENCLOSURE:
            if diag.value is None or pair.value is None:
                return Extremum(None, -1, DIAGONAL)
            return pair if pair.value > diag.value else diag
        if pair.x >= 0 and pair.value < diag.value:
            return pair
        return diag

    # exhaustive ----------------------------------------------------------
    def _chunk(self, mode, rows):
        d2, inner = _terms(self.X[rows], self.nu[rows], self.Y)
        diag = self.tsrc[None, :] == rows[:, None]
        r = _ratios(mode, self.w[rows], d2, inner, diag)
        if mode == ENCLOSURE and np.any((inner >= 0) & ~diag):
            return None
        k = int(np.argmax(r) if mode == ENCLOSURE else np.argmin(r))
        i, j = divmod(k, r.shape[1])
        return float(r[i, j]), int(rows[i]), j

    def exhaustive_pairs(self, mode, threads=1):
        n = len(self.X)
        step = max(1, _CHUNK_ELEMENTS // max(1, len(self.Y)))
        chunks = [np.arange(s, min(s + step, n)) for s in range(0, n, step)]
        if threads and threads > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(lambda rows: self._chunk(mode, rows), chunks))
        else:
            results = [self._chunk(mode, rows) for rows in chunks]
        if mode == ENCLOSURE and any(res is None for res in results):
            return Extremum(None, -1, -1)
        best_v = -np.inf if mode == ENCLOSURE else np.inf
        best = (-1, -1)
        for v, i, j in results:
            if _better(mode, v, (i, j), best_v, best) and np.isfinite(v):
                best_v, best = v, (i, j)
        return Extremum(float(best_v), *best)

    def exhaustive(self, mode, threads=1):
        return self._combine(mode, self.diagonal(mode), self.exhaustive_pairs(mode, threads))

    # branch and bound --------------------------------------------------------
    def leaves(self):
        """Target index sets from a median split on the longest bounding-box side."""
        if self._leaves is None:
            out = []
            stack = [np.arange(len(self.Y))]
            while stack:
                idx = stack.pop()
                P = self.Y[idx]
                if len(idx) <= _LEAF_SIZE:
                    out.append(idx)
                    continue
                ax = int(np.argmax(P.max(axis=0) - P.min(axis=0)))
                order = np.argsort(P[:, ax], kind="stable")
                half = len(idx) // 2
                stack.append(idx[order[half:]])
                stack.append(idx[order[:half]])
            lo = np.array([self.Y[i].min(axis=0) for i in out])
            hi = np.array([self.Y[i].max(axis=0) for i in out])
            self._leaves = (out, lo, hi)
        return self._leaves

    def _bounds(self, mode):
        """Bounds on the pair ratio for every (source, leaf); and which pairs can matter."""
        out, lo, hi = self.leaves()
        X, nu, w = self.X, self.nu, self.w
        gap = np.maximum(np.maximum(lo[None] - X[:, None], X[:, None] - hi[None]), 0.0)
        far = np.maximum(np.abs(lo[None] - X[:, None]), np.abs(hi[None] - X[:, None]))
        nx = np.sum(nu * X, axis=1)[:, None]
        n = nu[:, None, :]
        in_hi = np.sum(np.maximum(n * lo[None], n * hi[None]), axis=2) - nx
        in_lo = np.sum(np.minimum(n * lo[None], n * hi[None]), axis=2) - nx
        W = w[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            if mode == INTERIOR:
                live = in_lo < 0
                bound = np.where(live, W * np.sum(gap * gap, axis=2) / (-2.0 * in_lo), np.inf)
            elif mode == EXTERIOR:
                live = in_hi > 0
                bound = np.where(live, W * np.sum(gap * gap, axis=2) / (2.0 * in_hi), np.inf)
            else:
                # leaves that might hold a non-negative inner product keep an infinite bound
                scale = float(np.max(hi.max(axis=0) - lo.min(axis=0)))
                sure = in_hi < -1e-12 * scale
                live = np.ones_like(sure)
                bound = np.where(sure, W * np.sum(far * far, axis=2) / (-2.0 * in_hi), np.inf)
        return bound, live

    def pruned_pairs(self, mode, start=None):
        """Branch and bound over target leaves; `start` is an initial incumbent
        value such as the diagonal limit. The leaf bounds assume positive
        weights, which `search` enforces."""
        out, _, _ = self.leaves()
        enclosure = mode == ENCLOSURE
        bound, live = self._bounds(mode)
        if enclosure:
            key = np.where(live, bound, -np.inf).max(axis=0)
            order = np.argsort(-key, kind="stable")
        else:
            key = np.where(live, bound, np.inf).min(axis=0)
            order = np.argsort(key, kind="stable")
        best_v = (-np.inf if enclosure else np.inf) if start is None else start
        best = None
        for L in order:
            b = bound[:, L]
            if enclosure:
                if key[L] * (1 + _BOUND_SAFETY) < best_v:
                    break
                rows = np.nonzero(live[:, L] & (b * (1 + _BOUND_SAFETY) >= best_v))[0]
            else:
                if key[L] * (1 - _BOUND_SAFETY) > best_v:
                    break
                rows = np.nonzero(live[:, L] & (b * (1 - _BOUND_SAFETY) <= best_v))[0]
            if len(rows) == 0:
                continue
            idx = out[L]
            d2, inner = _terms(self.X[rows], self.nu[rows], self.Y[idx])
            diag = self.tsrc[idx][None, :] == rows[:, None]
            if enclosure and np.any((inner >= 0) & ~diag):
                return Extremum(None, -1, -1)
            r = _ratios(mode, self.w[rows], d2, inner, diag)
            v = float(r.max() if enclosure else r.min())
            if not np.isfinite(v):
                continue
            ii, jj = np.nonzero(r == v)
            xy = min(zip(rows[ii].tolist(), idx[jj].tolist()))
            if best is None:
                accept = v >= best_v if enclosure else v <= best_v
            else:
                accept = _better(mode, v, xy, best_v, best)
            if accept:
                best_v, best = v, xy
        if best is None:
            return Extremum(-np.inf if enclosure else np.inf, -1, -1)
        return Extremum(float(best_v), *best)

    def pruned(self, mode):
        diag = self.diagonal(mode)
        if mode == ENCLOSURE and diag.value is None:
            return Extremum(None, -1, DIAGONAL)
        start = diag.value if diag.x >= 0 else None
        pair = self.pruned_pairs(mode, start)
        if pair.value is None:
            return Extremum(None, -1, DIAGONAL)
        return self._combine(mode, diag, pair)

    def search(self, mode, pruned=False, threads=1):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if np.min(self.w) <= 0:
            i = int(np.argmin(self.w))
            name = "f" if self.use_f else "H"
            raise NotMeanConvexError(f"{name}[{i}] = {self.w[i]:.3e} is not positive; "
                                     "certificates need a positive weight (use the f-field mode)")
        return self.pruned(mode) if pruned else self.exhaustive(mode, threads)


def interior_delta_star(state, pruned=False, threads=1, use_f=None):
    """Largest delta with Z >= 0 on all pairs; (value, Extremum)."""
    e = PairSearch(state, use_f).search(INTERIOR, pruned, threads)
    return e.value, e


def exterior_delta_star(state, pruned=False, threads=1, use_f=None):
    """Largest exterior delta; +inf when no exterior constraint exists."""
    e = PairSearch(state, use_f).search(EXTERIOR, pruned, threads)
    return e.value, e


def enclosure_delta(state, pruned=False, threads=1, use_f=None):
    """Least delta with Z <= 0 on all pairs, or None unless strictly convex."""
    e = PairSearch(state, use_f).search(ENCLOSURE, pruned, threads)
    return e.value, e


# -- pinching ------------------------------------------------------------------

@dataclass(frozen=True)
class Pinching:
    interior: np.ndarray   # least eigenvalue of H g - delta h per vertex
    exterior: np.ndarray   # least eigenvalue of H g + delta h per vertex

    @property
    def interior_min(self):
        return float(np.min(self.interior))

    @property
    def exterior_min(self):
        return float(np.min(self.exterior))


def _least_eig(w, principal, delta):
    if np.isinf(delta):
        s = np.sign(delta) * principal
        lam = np.where(s > 0, np.inf, np.where(s < 0, -np.inf, w[:, None]))
        return lam.min(axis=1)
    return (w[:, None] + delta * principal).min(axis=1)


def pinching_spectrum(state, delta, delta_exterior=None, use_f=None):
    """Per-vertex least eigenvalues of H g - delta h and H g + delta_ext h."""
    _, F, w, _ = _unpack(state, use_f)
    de = delta if delta_exterior is None else delta_exterior
    return Pinching(_least_eig(w, F.principal, -delta), _least_eig(w, F.principal, de))


# -- touching balls -----------------------------------------------------------

@dataclass(frozen=True)
class TouchingBall:
    inside: bool
    clearance: float   # dist(p, M) - radius, <= 0; ~0 when the ball avoids M
    center: np.ndarray
    radius: float


def _ball_tolerance(radius, defect=0.0):
    return 1e-9 * (1.0 + radius) + defect


def _local_spacing(geometry):
    """Longer of the two edges at each source vertex (one edge at the ends of open profiles)."""
    e = geometry.spacing()
    if len(e) == geometry.N:
        return np.maximum(e, np.roll(e, 1))
    out = np.empty(geometry.N)
    out[0], out[-1] = e[0], e[-1]
    out[1:-1] = np.maximum(e[:-1], e[1:])
    return out


def _tangency_defect(geometry, rows, side):
    """Overlap of a tangent ball with the continuous boundary that the vertex data cannot resolve.

    Two effects, both vanishing under refinement:

    * the ball is tangent along the discrete normal, which differs from the
      spline normal at X by an angle eps; against the osculating circle of
      curvature kappa the ball then overlaps by r (1 - cos eps) / (1 - r kappa)
      to leading order, and twice that is allowed;
    * when the discrete principal curvatures say the ball fits locally
      (r lambda <= 1) the spline may still curve faster than 1/r between x and
      its neighbours, by at most (kappa - 1/r) l^2 / 2 over the edge length l.

    Returns a function of r.
    """
    X, nu, _ = geometry.pair_sources()
    X, nu = X[rows], nu[rows]
    n, kappa = geometry.boundary_frame(X)
    one_minus_cos = 0.5 * np.sum((np.atleast_2d(nu) - n) ** 2, axis=1)
    eps = np.sqrt(2.0 * one_minus_cos)
    F = geometry.fields()
    if side == INTERIOR:
        k, lam = kappa, F.lam_max[rows]
    else:
        k, lam = -kappa, -F.lam_min[rows]
    ell = _local_spacing(geometry)[rows]

    def defect(r):
        normal = 2.0 * r * one_minus_cos / np.maximum(np.maximum(1.0 - r * k, eps), 1e-300)
        with np.errstate(divide="ignore"):
            bend = np.where(r * lam <= 1.0, np.maximum(k - 1.0 / r, 0.0) * 0.5 * ell * ell, 0.0)
        return normal + bend
    return defect


def touching_ball_check(state, x, delta, side=INTERIOR, use_f=None):
    """Does the open ball of radius delta/H(x), tangent at X(x) on `side`, avoid M?

    Decided geometrically from the signed distance to the continuous
    boundary, independently of Z.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    geometry, _, w, _ = _unpack(state, use_f)
    X, nu, _ = geometry.pair_sources()
    r = float(delta / w[x])
    sign = -1.0 if side == INTERIOR else 1.0
    p = X[x] + sign * r * nu[x]
    s = float(geometry.region_distance(p[None, :])[0])
    clearance = (s if side == INTERIOR else -s) - r
    defect = float(_tangency_defect(geometry, [x], side)(np.array([r]))[0])
    return TouchingBall(bool(clearance >= -_ball_tolerance(r, defect)), clearance, p, r)


def ball_radii(state, side=INTERIOR, iterations=60, use_f=None):
    """Radius of the largest tangent ball at every source vertex (ball growing by bisection).

    Returns +inf where even a ball of 10^3 times the diameter fits.
    """
    geometry, _, _, _ = _unpack(state, use_f)
    X, nu, _ = geometry.pair_sources()
    Y, _ = geometry.pair_targets()
    diam = float(np.max(np.ptp(Y, axis=0))) * np.sqrt(Y.shape[1])
    sign = -1.0 if side == INTERIOR else 1.0
    defect = _tangency_defect(geometry, np.arange(len(X)), side)

    def fits(r):
        s = geometry.region_distance(X + sign * r[:, None] * nu)
        c = (s if side == INTERIOR else -s) - r
        return c >= -_ball_tolerance(r, defect(r))

    hi = np.full(len(X), diam if side == INTERIOR else 1e3 * diam)
    unbounded = fits(hi)
    lo = np.zeros(len(X))
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        ok = fits(mid)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    out = lo
    if side != INTERIOR:
        out = np.where(unbounded, np.inf, lo)
    return out


# -- delta sweeps ---------------------------------------------------------------

@dataclass(frozen=True)
class MinZ:
    delta: float
    z: float
    x: int
    y: int


def min_z(state, deltas, use_f=None):
    """min over pairs of Z for each delta in `deltas` (lexicographic argmin)."""
    geometry, _, w, _ = _unpack(state, use_f)
    X, nu, _ = geometry.pair_sources()
    Y, tsrc = geometry.pair_targets()
    deltas = [float(d) for d in deltas]
    best = [(np.inf, -1, -1) for _ in deltas]
    n = len(X)
    step = max(1, _CHUNK_ELEMENTS // max(1, len(Y)))
    for s in range(0, n, step):
        rows = np.arange(s, min(s + step, n))
        d2, inner = _terms(X[rows], nu[rows], Y)
        diag = tsrc[None, :] == rows[:, None]
        half = 0.5 * w[rows, None] * d2
        for m, delta in enumerate(deltas):
            Z = half + delta * inner
            Z[diag] = np.inf
            k = int(np.argmin(Z))
            i, j = divmod(k, Z.shape[1])
            if Z[i, j] < best[m][0]:
                best[m] = (float(Z[i, j]), int(rows[i]), j)
    return [MinZ(d, *b) for d, b in zip(deltas, best)]


# -- reports ------------------------------------------------------------------------

@dataclass(frozen=True)
class NoncollapseReport:
    t: float
    delta_interior: Optional[float]
    argmin_interior: Tuple[int, int]
    delta_exterior: Optional[float]
    argmin_exterior: Tuple[int, int]
    delta_enclosure: Optional[float]
    argmin_enclosure: Tuple[int, int]
    pinch_min_interior: Optional[float]
    pinch_min_exterior: Optional[float]
    r_in: Optional[float]
    r_out: Optional[float]
    H_min: float
    H_max: float
    isoperimetric: float
    f_mode: bool = False
    radius: Optional[float] = None      # radius of the round body with the same enclosed measure

    @property
    def pinch_min(self):
        return self.pinch_min_interior

    @property
    def radius_ratio(self):
        if self.r_in is None or self.r_out is None:
            return None
        return self.r_out / self.r_in


def analyze(state, interior=True, exterior=True, enclosure=True, pinching=True, radii=True,
            pruned=False, threads=1, use_f=None):
    """All certificates for one snapshot."""
    search = PairSearch(state, use_f)
    F = search.fields
    none = (-1, -1)
    d_in = d_ex = d_en = None
    a_in = a_ex = a_en = none
    if interior:
        e = search.search(INTERIOR, pruned, threads)
        d_in, a_in = e.value, e.pair()
    if exterior:
        e = search.search(EXTERIOR, pruned, threads)
        d_ex, a_ex = e.value, e.pair()
    if enclosure:
        e = search.search(ENCLOSURE, pruned, threads)
        d_en, a_en = e.value, e.pair()
    p_in = p_ex = None
    if pinching:
        P = pinching_spectrum(state, d_in if d_in is not None else 0.0,
                              d_ex if d_ex is not None else 0.0, use_f=search.use_f)
        p_in = P.interior_min if d_in is not None else None
        p_ex = P.exterior_min if d_ex is not None else None
    r_in = r_out = None
    if radii:
        r_in, r_out = inradius_circumradius(search.geometry)
    return NoncollapseReport(
        t=_state_time(state),
        delta_interior=d_in,
        argmin_interior=a_in,
        delta_exterior=d_ex,
        argmin_exterior=a_ex,
        delta_enclosure=d_en,
        argmin_enclosure=a_en,
        pinch_min_interior=p_in,
        pinch_min_exterior=p_ex,
        r_in=r_in,
        r_out=r_out,
        H_min=float(np.min(F.H)),
        H_max=float(np.max(F.H)),
        isoperimetric=float(search.geometry.isoperimetric_ratio()),
        f_mode=search.use_f,
        radius=equivalent_radius(search.geometry),
    )


def equivalent_radius(geometry):
    m = float(geometry.enclosed_measure())
    if geometry.kind == "curve":
        return float(np.sqrt(m / np.pi))
    return float(np.cbrt(3 * m / (4 * np.pi)))


@dataclass(frozen=True)
class Verdict:
    name: str
    direction: str       # "non-decreasing" | "non-increasing"
    ok: bool
    worst: float         # largest violation beyond the slack (<= 0 when ok)
    at: int              # report index of the worst step (-1 if none)


def monotone_verdict(name, values, direction, slack=1e-3):
    """Check a sequence for monotonicity with per-step slack slack * (1 + |previous|).

    None entries are skipped; +inf compares as the largest value.
    """
    sign = 1.0 if direction == "non-decreasing" else -1.0
    worst, at = -np.inf, -1
    prev = None
    for k, v in enumerate(values):
        if v is None:
            continue
        if prev is not None:
            if v == prev:
                excess = -slack
            else:
                tol = slack * (1.0 + abs(prev)) if np.isfinite(prev) else 0.0
                excess = sign * (prev - v) - tol
            if excess > worst:
                worst, at = excess, k
        prev = v
    return Verdict(name, direction, bool(worst <= 0), float(worst) if at >= 0 else 0.0, at)


@dataclass
class Certification:
    reports: list
    verdicts: dict

    @property
    def ok(self):
        return all(v.ok for v in self.verdicts.values())

    def series(self, name):
        return [getattr(r, name) for r in self.reports]


def certify(trajectory, slack=1e-3, interior=True, exterior=True, enclosure=True, pinching=True,
            radii=True, pruned=False, threads=1, use_f=None):
    """One report per snapshot plus monotonicity verdicts.

    delta_interior and delta_exterior must not decrease and delta_enclosure
    must not increase, each up to slack * (1 + |delta|) per snapshot.
    """
    states = list(trajectory)
    if not states:
        raise ValueError("empty trajectory")
    reports = [analyze(s, interior, exterior, enclosure, pinching, radii, pruned, threads, use_f)
               for s in states]
    verdicts = {}
    if interior:
        verdicts["delta_interior"] = monotone_verdict(
            "delta_interior", [r.delta_interior for r in reports], "non-decreasing", slack)
    if exterior:
        verdicts["delta_exterior"] = monotone_verdict(
            "delta_exterior", [r.delta_exterior for r in reports], "non-decreasing", slack)
    if enclosure:
        verdicts["delta_enclosure"] = monotone_verdict(
            "delta_enclosure", [r.delta_enclosure for r in reports], "non-increasing", slack)
    return Certification(reports, verdicts)
