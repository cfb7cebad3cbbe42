"""Finite-difference verification of the derivative identities of Z.

On an AnalyticSurface every exact term is available, so each identity is
checked by comparing a central difference of Z in geodesic normal
coordinates (second-order accurate coordinate curves) with the closed-form
right-hand side. On discrete states derivatives are taken along the vertex
polygon with non-uniform three-point stencils.

Identity ids:
    Zy, Zx               first derivatives in y and x
    Zyy, Zxy, Zxx        second derivatives
    Zt                   time derivative under mean curvature flow
    NormalIdentity       normal-vector identity at y
    EvolutionIdentity    the parabolic identity at a critical pair
"""

import csv
import hashlib
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import UnsupportedConfiguration
from .geometry import analytic
from .geometry import stencil

IDENTITIES = ("Zy", "Zx", "Zyy", "Zxy", "Zxx", "Zt", "NormalIdentity", "EvolutionIdentity")

FIRST_STEP = 1e-3
SECOND_STEP = 1e-2
ORDER_RATIO = (3.5, 4.5)
NOISE_FLOOR = 1e-10


@dataclass
class IdentityResidual:
    identity: str
    config: dict
    h: Optional[float]
    residual: float
    order: Optional[float] = None
    residual_half: Optional[float] = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.identity not in IDENTITIES:
            raise ValueError(f"unknown identity {self.identity!r}")
        self.residual = float(abs(self.residual))

    @property
    def ratio(self):
        if self.residual_half is None or self.residual_half == 0:
            return None
        return self.residual / self.residual_half

    @property
    def config_hash(self):
        return config_hash(self.config)

    def order_ok(self, lo=ORDER_RATIO[0], hi=ORDER_RATIO[1], floor=NOISE_FLOOR):
        """Halving ratio within [lo, hi], or both residuals below the noise floor."""
        if self.residual_half is None:
            return None
        if max(self.residual, self.residual_half) < floor:
            return True
        r = self.ratio
        return r is not None and lo <= r <= hi


def config_hash(config):
    text = repr(sorted((k, _plain(v)) for k, v in config.items()))
    return hashlib.sha1(text.encode()).hexdigest()[:12]


def _plain(v):
    if isinstance(v, np.ndarray):
        return tuple(round(float(x), 12) for x in v.ravel())
    if isinstance(v, (tuple, list)):
        return tuple(_plain(x) for x in v)
    if isinstance(v, float):
        return round(v, 12)
    return v


def _order(r, r_half):
    if r_half and r and r > 0 and r_half > 0:
        return float(np.log2(r / r_half))
    return None


# -- exact pair data ------------------------------------------------------------------

@dataclass
class PairData:
    """Everything the identities need at (x, y), from exact surface data."""

    S: object
    Lx: object
    Ly: object
    delta: float
    D: np.ndarray
    d: float
    w: np.ndarray
    Z: float

    @property
    def H(self):
        return self.Lx.H


def pair_data(S, px, py, delta):
    Lx, Ly = S.local(px), S.local(py)
    D = Ly.X - Lx.X
    d = float(np.linalg.norm(D))
    if d == 0:
        raise ValueError("x and y coincide")
    Z = 0.5 * Lx.H * d * d + delta * float(D @ Lx.nu)
    return PairData(S, Lx, Ly, float(delta), D, d, D / d, Z)


def _z(S, px, py, delta):
    X, Y = S.X(px), S.X(py)
    D = Y - X
    return 0.5 * S.H(px) * float(D @ D) + delta * float(D @ S.nu(px))


# -- right-hand sides -------------------------------------------------------------------

def rhs_zy(P):
    Ey = P.Ly.frame
    return P.d * P.H * (Ey @ P.w) + P.delta * (Ey @ P.Lx.nu)


def rhs_zx(P):
    Ex, Lx = P.Lx.frame, P.Lx
    wx = Ex @ P.w
    return -P.d * P.H * wx + 0.5 * P.d ** 2 * Lx.grad_H + P.delta * P.d * (Lx.h @ wx)


def rhs_zyy(P):
    Ly = P.Ly
    n = len(Ly.h)
    return (P.H * np.eye(n) - P.d * P.H * Ly.h * float(P.w @ Ly.nu)
            - P.delta * Ly.h * float(Ly.nu @ P.Lx.nu))


def rhs_zxy(P):
    """Matrix [i, j] = d^2 Z / dy_i dx_j."""
    Ex, Ey, Lx = P.Lx.frame, P.Ly.frame, P.Lx
    G = Ey @ Ex.T                        # [i, j] = <dy_i, dx_j>
    return -P.H * G + P.d * np.outer(Ey @ P.w, Lx.grad_H) + P.delta * G @ Lx.h.T


def rhs_zxx(P):
    Ex, Lx = P.Lx.frame, P.Lx
    n = len(Lx.h)
    d, H, delta = P.d, P.H, P.delta
    wx = Ex @ P.w
    wn = float(P.w @ Lx.nu)
    g = Lx.grad_H
    return (H * np.eye(n) - d * np.outer(wx, g) + d * H * Lx.h * wn - d * np.outer(g, wx)
            + 0.5 * d * d * Lx.hess_H.T
            + delta * d * np.einsum("jiq,q->ij", Lx.nabla_h, wx)
            - delta * Lx.h - delta * d * (Lx.h @ Lx.h) * wn)


def rhs_zt(P):
    """Time derivative of Z at fixed parameters under X_t = -H nu."""
    Lx, Ly = P.Lx, P.Ly
    V = -Ly.H * Ly.nu + Lx.H * Lx.nu
    grad = Lx.frame.T @ Lx.grad_H
    return (P.d * P.H * float(P.w @ V) + 0.5 * P.d ** 2 * (Lx.lap_H + Lx.H * Lx.A2)
            + P.delta * float(V @ Lx.nu) + P.delta * P.d * float(P.w @ grad))


# -- finite differences in normal coordinates -------------------------------------------------

def _curvature_radius(S, p):
    k = np.max(np.abs(S.principal_curvatures(p)))
    return 1.0 / k if k > 0 else 1.0


def _step(S, px, py, factor):
    return factor * min(_curvature_radius(S, px), _curvature_radius(S, py))


def fd_first(S, px, py, delta, h):
    n = S.n
    I = np.eye(n)
    zy = np.array([(_z(S, px, S.curve_param(py, I[i], h), delta)
                    - _z(S, px, S.curve_param(py, I[i], -h), delta)) / (2 * h) for i in range(n)])
    zx = np.array([(_z(S, S.curve_param(px, I[i], h), py, delta)
                    - _z(S, S.curve_param(px, I[i], -h), py, delta)) / (2 * h) for i in range(n)])
    return zy, zx


def _hessian(f, n, h):
    """Hessian of f(v, t) (value at the point t*v) by second differences and polarization."""
    f0 = f(np.zeros(n), 0.0)

    def second(v):
        return (f(v, h) - 2 * f0 + f(v, -h)) / (h * h)

    I = np.eye(n)
    M = np.zeros((n, n))
    for i in range(n):
        M[i, i] = second(I[i])
        for j in range(i):
            M[i, j] = M[j, i] = 0.25 * (second(I[i] + I[j]) - second(I[i] - I[j]))
    return M


def fd_second(S, px, py, delta, h):
    n = S.n
    I = np.eye(n)
    zyy = _hessian(lambda v, t: _z(S, px, S.curve_param(py, v, t), delta), n, h)
    zxx = _hessian(lambda v, t: _z(S, S.curve_param(px, v, t), py, delta), n, h)
    zxy = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            vals = [_z(S, S.curve_param(px, I[j], sx * h), S.curve_param(py, I[i], sy * h), delta)
                    for sx, sy in ((1, 1), (1, -1), (-1, 1), (-1, -1))]
            zxy[i, j] = (vals[0] - vals[1] - vals[2] + vals[3]) / (4 * h * h)
    return zyy, zxy, zxx


def _config(S, px, py, delta, **extra):
    c = {"surface": S.name, "x": tuple(np.atleast_1d(px).tolist()),
         "y": tuple(np.atleast_1d(py).tolist()), "delta": float(delta)}
    c.update(extra)
    return c


def _err(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def check_first_derivatives(S, px, py, delta, h=None, halve=True):
    """Residuals of the first-derivative formulas in y and x: (Zy, Zx)."""
    h = _step(S, px, py, FIRST_STEP) if h is None else h
    P = pair_data(S, px, py, delta)
    ay, ax = rhs_zy(P), rhs_zx(P)
    zy, zx = fd_first(S, px, py, delta, h)
    out = []
    for name, fd, an, half in (("Zy", zy, ay, 0), ("Zx", zx, ax, 1)):
        r = _err(fd, an)
        det = {"analytic": an, "numeric": fd}
        r2 = None
        if halve:
            fd2 = fd_first(S, px, py, delta, h / 2)[half]
            r2 = _err(fd2, an)
            det["richardson"] = _err((4 * fd2 - fd) / 3, an)
        out.append(IdentityResidual(name, _config(S, px, py, delta), h, r,
                                    _order(r, r2) if halve else None, r2, det))
    return tuple(out)


def check_second_derivatives(S, px, py, delta, h=None, halve=True):
    """Residuals of the second-derivative formulas: (Zyy, Zxy, Zxx)."""
    h = _step(S, px, py, SECOND_STEP) if h is None else h
    P = pair_data(S, px, py, delta)
    analytic_ = (rhs_zyy(P), rhs_zxy(P), rhs_zxx(P))
    numeric = fd_second(S, px, py, delta, h)
    numeric_half = fd_second(S, px, py, delta, h / 2) if halve else (None,) * 3
    out = []
    for name, an, fd, fd2 in zip(("Zyy", "Zxy", "Zxx"), analytic_, numeric, numeric_half):
        r = _err(fd, an)
        r2 = _err(fd2, an) if halve else None
        det = {"analytic": an, "numeric": fd}
        if halve:
            det["richardson"] = _err((4 * fd2 - fd) / 3, an)
        out.append(IdentityResidual(name, _config(S, px, py, delta), h, r,
                                    _order(r, r2) if halve else None, r2, det))
    return tuple(out)


def normal_identity_vectors(S, px, py, delta):
    """(left-hand vector, nu_y, radicand) of the normal-vector identity at y."""
    P = pair_data(S, px, py, delta)
    gradZ = P.Ly.frame.T @ rhs_zy(P)
    lhs = P.Lx.nu + (P.d * P.H / delta) * P.w - gradZ / delta
    radicand = 1 + 2 * P.H * P.Z / delta ** 2 - float(gradZ @ gradZ) / delta ** 2
    return lhs, P.Ly.nu, radicand, gradZ


def check_normal_identity(S, px, py, delta):
    """|nu_x + (d H_x/delta) w - grad_y Z / delta - rho nu_y| from exact data.

    Skipped (residual nan, details['skipped']) when the radicand is negative.
    """
    if delta == 0:
        raise ValueError("the identity divides by delta")
    lhs, nu_y, radicand, gradZ = normal_identity_vectors(S, px, py, delta)
    cfg = _config(S, px, py, delta)
    if radicand < 0:
        return IdentityResidual("NormalIdentity", cfg, None, float("nan"),
                                details={"skipped": f"negative radicand {radicand:.3e}"})
    rho = np.sqrt(radicand)
    r = float(np.linalg.norm(lhs - rho * nu_y))
    return IdentityResidual("NormalIdentity", cfg, None, r, details={
        "rho": rho,
        "norm_identity": abs(float(lhs @ lhs) - radicand),
        "tangency": abs(float(gradZ @ nu_y)),
        "sign": float(np.sign(lhs @ nu_y)),
    })


def _self_similar_radius(S):
    R = S.info.get("radius")
    if R is None:
        raise UnsupportedConfiguration(
            f"{S.name}: exact time derivatives need a self-similar (round) surface")
    return float(R)


def check_time_derivative_exact(S, px, py, delta):
    """Time-derivative formula against the shrinking circle/sphere closed form.

    Round solutions shrink homothetically, X(t) = (R(t)/R) X, so Z scales
    with R(t) and dZ/dt = -(n / R^2) Z at every fixed pair.
    """
    R = _self_similar_radius(S)
    P = pair_data(S, px, py, delta)
    exact = -S.n * P.Z / R ** 2
    an = rhs_zt(P)
    return IdentityResidual("Zt", _config(S, px, py, delta, mode="closed-form"), None,
                            abs(exact - an), details={"closed_form": exact, "formula": an})


# -- the evolution identity on analytic round surfaces ------------------------------------------

def _rotate(L, F):
    """Express a LocalData's tensors in the orthonormal tangent frame F (rows)."""
    R = F @ L.frame.T
    return {
        "h": R @ L.h @ R.T,
        "grad_H": R @ L.grad_H,
        "hess_H": R @ L.hess_H @ R.T,
        "nabla_h": np.einsum("abc,ka,ib,jc->kij", L.nabla_h, R, R, R),
    }


def adapted_frames(Lx, Ly):
    """Orthonormal frames at x and y sharing the first n-1 vectors.

    The last vectors are then coplanar with nu_x and nu_y. Only n = 1 and
    pairs on round spheres are supported.
    """
    n = len(Lx.h)
    if n == 1:
        return Lx.frame, Ly.frame
    c = np.cross(Lx.nu, Ly.nu)
    if np.linalg.norm(c) < 1e-12:
        e1 = Lx.frame[0]
    else:
        e1 = c / np.linalg.norm(c)
    Fx = np.array([e1, np.cross(Lx.nu, e1)])
    Fy = np.array([e1, np.cross(Ly.nu, e1)])
    if abs(e1 @ Ly.nu) > 1e-9:
        raise UnsupportedConfiguration("no common tangent direction at x and y")
    return Fx, Fy


def _with_frame(L, F):
    from dataclasses import replace as _replace
    t = _rotate(L, F)
    return _replace(L, frame=F, h=t["h"], grad_H=t["grad_H"], hess_H=t["hess_H"],
                    nabla_h=t["nabla_h"])


def identity_terms(P, Fx, Fy, zt, zxx, zyy, zyx):
    """Both sides of the evolution identity from assembled derivatives.

    Returns (operator residual lhs, claimed coefficient * Z, pre-critical rhs).
    """
    Lx = P.Lx
    n = len(Lx.h)
    G = Fx @ Fy.T                       # [i, j] = <dx_i, dy_j>
    op = np.trace(zxx) + np.trace(zyy) + 2.0 * np.sum(G * zyx.T)
    lhs = zt - op
    hnn = Lx.h[n - 1, n - 1]
    A2 = float(np.sum(Lx.h * Lx.h))
    wyn = float(P.w @ Fy[n - 1])
    claimed = (A2 + 4 * Lx.H * (Lx.H - P.delta * hnn) / P.delta ** 2 * wyn ** 2) * P.Z
    proj = Fx - G @ Fy
    general = (P.Z * A2 + 2 * P.d * float((proj @ P.w) @ Lx.grad_H)
               - 2 * (Lx.H - P.delta * hnn) * (1 - G[n - 1, n - 1] ** 2))
    return lhs, claimed, general


def check_evolution_identity_exact(S, px, py, delta):
    """Evolution identity on a shrinking circle or round sphere, every term in closed form.

    The claimed form holds at critical points of Z; details also carry the
    pre-critical form (valid at every pair) and |grad Z| at the pair.
    """
    if delta == 0:
        raise ValueError("the identity divides by delta")
    if S.n == 2 and "radius" not in S.info:
        raise UnsupportedConfiguration(
            f"{S.name}: adapted frames at two general points of a surface are not constructed")
    R = _self_similar_radius(S)
    P0 = pair_data(S, px, py, delta)
    Fx, Fy = adapted_frames(P0.Lx, P0.Ly)
    Lx, Ly = _with_frame(P0.Lx, Fx), _with_frame(P0.Ly, Fy)
    P = PairData(S, Lx, Ly, P0.delta, P0.D, P0.d, P0.w, P0.Z)
    zt = -S.n * P.Z / R ** 2
    lhs, claimed, general = identity_terms(P, Fx, Fy, zt, rhs_zxx(P), rhs_zyy(P), rhs_zxy(P))
    grad = np.concatenate([rhs_zy(P), rhs_zx(P)])
    return IdentityResidual("EvolutionIdentity", _config(S, px, py, delta, mode="closed-form"),
                            None, abs(lhs - claimed), details={
                                "lhs": lhs, "claimed": claimed,
                                "general_residual": abs(lhs - general),
                                "grad_norm": float(np.linalg.norm(grad)),
                            })


# -- discrete states --------------------------------------------------------------------------

def _require_curve(state):
    g = getattr(state, "geometry", state)
    if g.kind != "curve":
        raise UnsupportedConfiguration(
            "discrete evolution-identity and derivative checks are implemented for curves; "
            "adapted frames at general pairs of a surface are not constructed")
    return g


def _pair_vectors(geometry, F, x, y):
    """Normals, unit tangents and targets at (source x, target y) in ambient space."""
    if geometry.kind == "curve":
        return F.normal[x], F.normal[y], F.tangent[x], geometry.vertices[y], y
    Y, prof, az = geometry.realize()
    i, a = int(prof[y]), int(az[y])
    nu_y = geometry.lift(F.normal[i], a)[0]
    return geometry.lift(F.normal[x])[0], nu_y, geometry.lift(F.tangent[x])[0], Y[y], i


def check_time_derivative(state_a, state_b, pair, delta):
    """(Z(t+dt) - Z(t)) / dt at a material pair against the time-derivative formula.

    The right-hand side uses the discrete fields of `state_a`. The two states
    must share material vertices (no remeshing in between).
    """
    from .noncollapse import z_value

    if getattr(state_a, "remesh_count", 0) != getattr(state_b, "remesh_count", 0):
        raise ValueError("remeshing was active between the two states; vertices are not material")
    ga, gb = state_a.geometry, state_b.geometry
    if ga.N != gb.N:
        raise ValueError("states have different vertex counts")
    dt = state_b.t - state_a.t
    if not dt > 0:
        raise ValueError("states must be ordered in time")
    x, y = pair
    za = z_value(state_a, x, y, delta, use_f=False)
    zb = z_value(state_b, x, y, delta, use_f=False)
    F = ga.fields()
    nu_x, nu_y, T_x, Y, iy = _pair_vectors(ga, F, x, y)
    H_x, H_y = F.H[x], F.H[iy]
    w, d = za.w, za.d
    V = -H_y * nu_y + H_x * nu_x
    rhs = (d * H_x * float(w @ V) + 0.5 * d * d * (F.lap_H[x] + H_x * F.A2[x])
           + delta * float(V @ nu_x) + delta * d * F.grad_H[x] * float(w @ T_x))
    lhs = (zb.z - za.z) / dt
    cfg = {"surface": repr(ga), "x": int(x), "y": int(y), "delta": float(delta), "t": state_a.t}
    return IdentityResidual("Zt", cfg, dt, abs(lhs - rhs), details={"numeric": lhs, "formula": rhs})


def _z_grid(geometry, xs, ys, delta):
    """Z at all (x, y) combinations of the given vertex index arrays (curves)."""
    V = geometry.vertices
    F = geometry.fields()
    D = V[ys][None, :, :] - V[xs][:, None, :]
    d2 = np.sum(D * D, axis=2)
    inner = np.einsum("ijk,ik->ij", D, F.normal[xs])
    return 0.5 * F.H[xs][:, None] * d2 + delta * inner


def _stencil_weights(a, b):
    """First and second derivative weights on (prev, cur, next) with spacings a, b."""
    d1 = np.array([-b / (a * (a + b)), (b - a) / (a * b), a / (b * (a + b))])
    d2 = np.array([2 / (a * (a + b)), -2 / (a * b), 2 / (b * (a + b))])
    return d1, d2


def discrete_identity_terms(state, pair, delta, dt=None, dt_fraction=0.25):
    """Every term of the evolution identity at a vertex pair of a discrete curve.

    Space derivatives use three-point arclength stencils at x and y; the time
    derivative uses two explicit steps without remeshing and the one-sided
    second-order difference.
    """
    from .flow import FlowConfig, initial_state, mcf_step, stable_dt

    g = _require_curve(state)
    n = g.N
    x, y = (int(v) for v in pair)
    if (x - y) % n in (0, 1, n - 1):
        raise ValueError("x and y must be separated by at least one vertex")
    cfg = FlowConfig(remesh=False)
    if dt is None:
        dt = dt_fraction * stable_dt(g, cfg)[0]
    s0 = initial_state(g)
    s1 = mcf_step(s0, dt, cfg)
    s2 = mcf_step(s1, dt, cfg)
    idx = np.array([x, y])
    zs = [float(_z_grid(s.geometry, idx[:1], idx[1:], delta)[0, 0]) for s in (s0, s1, s2)]
    zt = (-3 * zs[0] + 4 * zs[1] - zs[2]) / (2 * dt)

    b = g.spacing()
    a = np.roll(b, 1)
    xs = (x + np.arange(-1, 2)) % n
    ys = (y + np.arange(-1, 2)) % n
    Zg = _z_grid(g, xs, ys, delta)
    d1x, d2x = _stencil_weights(a[x], b[x])
    d1y, d2y = _stencil_weights(a[y], b[y])
    zxx = float(d2x @ Zg[:, 1])
    zyy = float(d2y @ Zg[1, :])
    zxy = float(d1x @ Zg @ d1y)
    zx = float(d1x @ Zg[:, 1])
    zy = float(d1y @ Zg[1, :])
    F = g.fields()
    Tx, Ty = F.tangent[x], F.tangent[y]
    D = g.vertices[y] - g.vertices[x]
    d = float(np.linalg.norm(D))
    w = D / d
    Z = float(Zg[1, 1])
    k = F.H[x]
    G = float(Tx @ Ty)
    op = zxx + zyy + 2 * G * zxy
    lhs = zt - op
    claimed = (k * k + 4 * k * (k - delta * k) / delta ** 2 * float(w @ Ty) ** 2) * Z
    general = (Z * k * k + 2 * d * float(w @ (Tx - G * Ty)) * F.grad_H[x]
               - 2 * (k - delta * k) * (1 - G * G))
    return {"lhs": lhs, "claimed": claimed, "general": general, "Z": Z, "zt": zt, "op": op,
            "grad_norm": float(np.hypot(zx, zy)), "dt": dt, "h": float(g.mean_spacing())}


def check_evolution_identity(state, delta, pair=None, dt=None):
    """Evolution-identity residual at a vertex pair of a discrete curve.

    The default pair is the interior certificate's extremal pair, a critical
    point of Z on symmetric configurations. The residual is expected to scale
    like h + |grad Z| at the pair.
    """
    from .noncollapse import interior_delta_star

    g = _require_curve(state)
    if delta == 0:
        raise ValueError("the identity divides by delta")
    if pair is None:
        _, e = interior_delta_star(state)
        if e.on_diagonal:
            raise ValueError("the interior certificate is attained on the diagonal; pass a pair")
        pair = e.pair()
    T = discrete_identity_terms(state, pair, delta, dt)
    cfg = {"surface": repr(g), "x": int(pair[0]), "y": int(pair[1]), "delta": float(delta),
           "t": float(getattr(state, "t", 0.0))}
    return IdentityResidual("EvolutionIdentity", cfg, T["h"], abs(T["lhs"] - T["claimed"]),
                            details={**T, "general_residual": abs(T["lhs"] - T["general"])})


# -- suites -----------------------------------------------------------------------------------

# finite-difference tolerances apply to the Richardson-extrapolated residual
TOLERANCES = {
    "Zy": 1e-6, "Zx": 1e-6, "Zyy": 1e-6, "Zxy": 1e-6, "Zxx": 1e-6,
    "Zt": 1e-6, "NormalIdentity": 1e-12, "EvolutionIdentity": 1e-6,
}


def default_surfaces():
    return [
        analytic.circle(1.0),
        analytic.circle(2.0),
        analytic.ellipse(2.0, 1.0),
        analytic.sphere(1.0),
        analytic.ellipsoid(1.0, 2.0),
        analytic.ellipsoid(2.0, 1.0),
    ]


def default_configurations():
    """(surface, x, y, delta) tuples of generic pairs across the analytic test bed."""
    out = []
    for S in default_surfaces():
        if S.n == 1:
            pairs = [(0.3, 1.9), (0.0, np.pi / 2), (1.0, 4.0), (2.5, 5.5)]
            deltas = (0.7, 1.5) if "circle" in S.name else (0.5, 0.9)
        else:
            pairs = [((0.3, 0.2), (-0.5, 1.9)), ((-0.4, 0.0), (0.6, 2.7)),
                     ((0.9, 1.0), (0.1, 4.0))]
            deltas = (1.0, 1.5)
        for px, py in pairs:
            for delta in deltas:
                out.append((S, np.atleast_1d(px).astype(float), np.atleast_1d(py).astype(float),
                            delta))
    return out


def sampled_delta_star(S, m=None):
    """Interior certificate of an analytic surface from a dense parameter sample."""
    if S.n == 1:
        m = m or 720
        P = np.linspace(0, 2 * np.pi, m, endpoint=False)[:, None]
    else:
        m = m or 24
        u = np.linspace(-np.pi / 2, np.pi / 2, m + 2)[1:-1]
        phi = np.linspace(0, 2 * np.pi, 2 * m, endpoint=False)
        P = np.stack(np.meshgrid(u, phi, indexing="ij"), axis=-1).reshape(-1, 2)
    X = np.array([S.X(p) for p in P])
    nu = np.array([S.nu(p) for p in P])
    H = np.array([S.H(p) for p in P])
    lam = np.empty(len(P))
    for k, p in enumerate(P):
        d = S.dX(p)
        h = np.array(S._h(*p), dtype=float)
        lam[k] = np.linalg.eigvals(np.linalg.solve(d @ d.T, h)).real.max()
    best = float(np.min(H / lam))
    for i in range(len(P)):
        D = X - X[i]
        inner = D @ nu[i]
        mask = inner < -1e-14
        if mask.any():
            best = min(best, float(np.min(H[i] * np.sum(D[mask] ** 2, axis=1) / (-2 * inner[mask]))))
    return best


def _antipodal(S):
    if S.n == 1:
        return [(np.array([0.4]), np.array([0.4 + np.pi]))]
    return [(np.array([0.3, 0.5]), np.array([-0.3, 0.5 + np.pi]))]


def run_suite(selection="all", scale=1.0):
    """Run the selected identity checks on the default grid.

    Returns a list of (IdentityResidual, passed, tolerance).
    """
    chosen = IDENTITIES if selection == "all" else tuple(selection if isinstance(selection, (list, tuple))
                                                         else (selection,))
    unknown = [s for s in chosen if s not in IDENTITIES]
    if unknown:
        raise KeyError(f"unknown identity suite {unknown[0]!r}; choose from all, {', '.join(IDENTITIES)}")
    results = []

    def add(r, tol=None, need_order=False):
        t = scale * (TOLERANCES[r.identity] if tol is None else tol)
        value = r.details.get("richardson", r.residual)
        ok = bool(np.isfinite(value) and value <= t)
        if need_order:
            ok = ok and bool(r.order_ok())
        results.append((r, ok, t))

    configs = default_configurations()
    if {"Zy", "Zx"} & set(chosen):
        for S, px, py, delta in configs:
            for r in check_first_derivatives(S, px, py, delta):
                if r.identity in chosen:
                    add(r, need_order=True)
    if {"Zyy", "Zxy", "Zxx"} & set(chosen):
        for S, px, py, delta in configs:
            for r in check_second_derivatives(S, px, py, delta):
                if r.identity in chosen:
                    add(r, need_order=True)
    if "NormalIdentity" in chosen:
        # the identity picks the + root only in the non-collapsed regime delta <= delta*
        dstar = {}
        for S, px, py, _ in configs:
            if id(S) not in dstar:
                dstar[id(S)] = sampled_delta_star(S)
            for frac in (0.5, 0.9):
                r = check_normal_identity(S, px, py, frac * dstar[id(S)])
                if "skipped" not in r.details:
                    add(r)
    round_ = [S for S in default_surfaces() if "radius" in S.info]
    if "Zt" in chosen:
        for S in round_:
            for (px, py) in [(c[1], c[2]) for c in configs if c[0] is S]:
                for delta in (0.0, 0.5, 1.0):
                    add(check_time_derivative_exact(S, px, py, delta))
    if "EvolutionIdentity" in chosen:
        for S in round_:
            for px, py in _antipodal(S):
                for delta in (0.5, 1.0, 1.5):
                    add(check_evolution_identity_exact(S, px, py, delta))
    for ident in ("Zt", "EvolutionIdentity"):
        if ident in chosen:
            for r in refinement_study(ident):
                ok = r.order is None or r.order >= 1.0
                results.append((r, ok, float("nan")))
    return results


def refinement_study(identity="EvolutionIdentity", levels=(64, 128, 256), t_end=0.3,
                     delta_fraction=0.9, shape=None):
    """Discrete residuals on an evolving curve under simultaneous h, dt refinement.

    Each level evolves the same initial curve (default: the 2:1 ellipse) to
    t_end without remeshing, then evaluates the identity at the interior
    certificate's extremal pair with delta = delta_fraction * delta*. Time
    steps follow the diffusion bound, so dt scales like h^2. The `order`
    of each result is measured against the previous level.
    """
    from .flow import FlowConfig, evolve, mcf_step, stable_dt
    from .geometry import build
    from .noncollapse import interior_delta_star

    if identity not in ("EvolutionIdentity", "Zt"):
        raise KeyError(f"no refinement study for {identity!r}")
    shape = shape or {"shape": "ellipse", "a": 2.0, "b": 1.0}
    cfg = FlowConfig(remesh=False)
    out = []
    for N in levels:
        state = evolve(build(dict(shape, N=N)), t_end, cfg).final
        dstar, e = interior_delta_star(state)
        delta = delta_fraction * dstar
        if identity == "EvolutionIdentity":
            r = check_evolution_identity(state, delta, e.pair() if not e.on_diagonal else None)
        else:
            dt = 0.5 * stable_dt(state.geometry, cfg)[0]
            r = check_time_derivative(state, mcf_step(state, dt, cfg), e.pair(), delta)
        r.config["N"] = N
        if out:
            r.order = _order(out[-1].residual, r.residual)
        out.append(r)
    return out


CSV_FIELDS = ("identity", "config_hash", "h", "residual", "order")


def residuals_csv(results):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_FIELDS + ("tolerance", "passed"))
    for r, ok, tol in results:
        wr.writerow([r.identity, r.config_hash, "" if r.h is None else repr(float(r.h)),
                     repr(r.residual), "" if r.order is None else repr(r.order),
                     repr(tol), "pass" if ok else "FAIL"])
    return buf.getvalue()


def summary(results):
    lines = []
    for ident in IDENTITIES:
        rows = [(r, ok) for r, ok, _ in results if r.identity == ident]
        if not rows:
            continue
        worst = max(r.residual for r, _ in rows)
        failed = sum(not ok for _, ok in rows)
        lines.append(f"{ident:18s} {len(rows):4d} checks  worst residual {worst:.3e}  "
                     f"{'PASS' if failed == 0 else f'FAIL ({failed})'}")
    return "\n".join(lines)
