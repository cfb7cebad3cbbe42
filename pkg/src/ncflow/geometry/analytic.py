"""Parametrized curves and surfaces of revolution with exact derivatives.

Every derivative is produced symbolically once per instance and compiled with
``sympy.lambdify``; evaluation is then plain floating point.

Conventions: the unit normal points out of the enclosed region, the second
fundamental form is ``h_ij = -<d_i d_j X, nu>`` (so a round sphere of radius R
has h = g / R) and ``H = g^ij h_ij``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as sp


@dataclass(frozen=True)
class LocalData:
    """Exact surface data at one point, expressed in an orthonormal tangent frame."""

    param: np.ndarray
    X: np.ndarray
    frame: np.ndarray       # (n, m) orthonormal tangent vectors
    param_frame: np.ndarray  # (n, n) columns map frame vectors to parameter velocities
    nu: np.ndarray
    H: float
    grad_H: np.ndarray      # (n,)
    hess_H: np.ndarray      # (n, n) covariant Hessian
    h: np.ndarray           # (n, n)
    nabla_h: np.ndarray     # (n, n, n), [k, i, j] = (nabla_k h)_ij
    lap_H: float
    A2: float


def _lam(args, expr):
    return sp.lambdify(args, expr, modules="numpy", cse=True)


class AnalyticSurface:
    """A curve in the plane (n=1) or a surface of revolution in space (n=2)."""

    def __init__(self, name, params, X, domain, closed=True, **info):
        self.name = name
        self.n = len(params)
        self.ambient = self.n + 1
        self.domain = domain
        self.closed = closed
        self.info = info
        p = list(params)
        X = sp.Matrix(X)
        dX = [X.diff(q) for q in p]
        d2X = [[dX[i].diff(q) for q in p] for i in range(self.n)]
        d3X = [[[d2X[i][j].diff(q) for q in p] for j in range(self.n)] for i in range(self.n)]
        if self.n == 1:
            N = sp.Matrix([dX[0][1], -dX[0][0]])
        else:
            N = dX[1].cross(dX[0])
        nu = N / sp.sqrt(N.dot(N))
        g = sp.Matrix(self.n, self.n, lambda i, j: dX[i].dot(dX[j]))
        ginv = g.inv()
        h = sp.Matrix(self.n, self.n, lambda i, j: -d2X[i][j].dot(nu))
        H = sum(ginv[i, j] * h[i, j] for i in range(self.n) for j in range(self.n))
        dH = [H.diff(q) for q in p]
        ddH = [[dH[i].diff(q) for q in p] for i in range(self.n)]
        self._X = _lam(p, list(X))
        self._dX = _lam(p, [list(v) for v in dX])
        self._d2X = _lam(p, [[list(v) for v in row] for row in d2X])
        self._d3X = _lam(p, [[[list(v) for v in r2] for r2 in r1] for r1 in d3X])
        self._nu = _lam(p, list(nu))
        self._H = _lam(p, H)
        self._dH = _lam(p, dH)
        self._ddH = _lam(p, ddH)
        self._h = _lam(p, [[h[i, j] for j in range(self.n)] for i in range(self.n)])
        self._dh = _lam(p, [[[h[i, j].diff(q) for j in range(self.n)] for i in range(self.n)] for q in p])

    def __repr__(self):
        return f"AnalyticSurface({self.name})"

    # raw parameter-space evaluation
    def X(self, p):
        return np.array(self._X(*np.atleast_1d(p)), dtype=float)

    def dX(self, p):
        return np.array(self._dX(*np.atleast_1d(p)), dtype=float)

    def d2X(self, p):
        return np.array(self._d2X(*np.atleast_1d(p)), dtype=float)

    def d3X(self, p):
        return np.array(self._d3X(*np.atleast_1d(p)), dtype=float)

    def nu(self, p):
        return np.array(self._nu(*np.atleast_1d(p)), dtype=float)

    def H(self, p):
        return float(self._H(*np.atleast_1d(p)))

    def metric(self, p):
        d = self.dX(p)
        return d @ d.T

    def christoffel(self, p):
        """Gamma[k, i, j] = g^{kl} <d_i d_j X, d_l X>."""
        d = self.dX(p)
        d2 = self.d2X(p)
        ginv = np.linalg.inv(d @ d.T)
        return np.einsum("kl,ijm,lm->kij", ginv, d2, d)

    def orthonormal_frame(self, p):
        """Returns (frame vectors (n, m), parameter velocities (n, n) as columns)."""
        d = self.dX(p)
        A = np.zeros((self.n, self.n))
        E = []
        for i in range(self.n):
            a = np.zeros(self.n)
            a[i] = 1.0
            v = d[i].copy()
            for k, e in enumerate(E):
                c = v @ e
                v = v - c * e
                a = a - c * A[:, k]
            nrm = np.linalg.norm(v)
            E.append(v / nrm)
            A[:, i] = a / nrm
        return np.array(E), A

    def local(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        E, A = self.orthonormal_frame(p)
        G = self.christoffel(p)
        dH = np.array(self._dH(*p), dtype=float)
        ddH = np.array(self._ddH(*p), dtype=float)
        h = np.array(self._h(*p), dtype=float)
        dh = np.array(self._dh(*p), dtype=float)  # [k, i, j] = d_k h_ij
        hess = ddH - np.einsum("kij,k->ij", G, dH)
        nab = dh - np.einsum("lki,lj->kij", G, h) - np.einsum("lkj,il->kij", G, h)
        hF = A.T @ h @ A
        hessF = A.T @ hess @ A
        return LocalData(
            param=p,
            X=self.X(p),
            frame=E,
            param_frame=A,
            nu=self.nu(p),
            H=self.H(p),
            grad_H=A.T @ dH,
            hess_H=hessF,
            h=hF,
            nabla_h=np.einsum("kij,ka,ib,jc->abc", nab, A, A, A),
            lap_H=float(np.trace(hessF)),
            A2=float(np.sum(hF * hF)),
        )

    def curve_param(self, p, v, t):
        """Parameter point at time t along a curve with velocity v (frame components)
        and zero covariant acceleration at t = 0."""
        p = np.atleast_1d(np.asarray(p, dtype=float))
        _, A = self.orthonormal_frame(p)
        a = A @ np.asarray(v, dtype=float)
        G = self.christoffel(p)
        return p + t * a - 0.5 * t * t * np.einsum("kij,i,j->k", G, a, a)

    def principal_curvatures(self, p):
        return np.linalg.eigvalsh(self.local(p).h)


_t, _u, _phi = sp.symbols("theta u phi", real=True)


def _revolution(name, rho, zeta, domain, closed, **info):
    X = [rho * sp.cos(_phi), rho * sp.sin(_phi), zeta]
    return AnalyticSurface(name, (_u, _phi), X, domain, closed=closed, profile=(rho, zeta), **info)


@lru_cache(maxsize=None)
def circle(R=1.0):
    R = sp.Float(R)
    return AnalyticSurface(f"circle(R={float(R):g})", (_t,), [R * sp.cos(_t), R * sp.sin(_t)],
                           [(0.0, 2 * np.pi)], radius=float(R))


@lru_cache(maxsize=None)
def ellipse(a=2.0, b=1.0):
    A, B = sp.Float(a), sp.Float(b)
    return AnalyticSurface(f"ellipse(a={a:g},b={b:g})", (_t,), [A * sp.cos(_t), B * sp.sin(_t)],
                           [(0.0, 2 * np.pi)])


def fourier_star(coefficients, base=1.0):
    return _fourier_star(tuple(tuple(float(v) for v in c) for c in coefficients), float(base))


@lru_cache(maxsize=None)
def _fourier_star(coefficients, base):
    r = sp.Float(base)
    for c in coefficients:
        k, ac = int(c[0]), sp.Float(c[1])
        bs = sp.Float(c[2]) if len(c) > 2 else 0
        r = r + ac * sp.cos(k * _t) + bs * sp.sin(k * _t)
    return AnalyticSurface("fourier_star", (_t,), [r * sp.cos(_t), r * sp.sin(_t)], [(0.0, 2 * np.pi)])


@lru_cache(maxsize=None)
def sphere(R=1.0):
    R_ = sp.Float(R)
    return _revolution(f"sphere(R={R:g})", R_ * sp.cos(_u), R_ * sp.sin(_u),
                       [(-np.pi / 2, np.pi / 2), (0.0, 2 * np.pi)], closed=False, radius=float(R))


@lru_cache(maxsize=None)
def ellipsoid(a=1.0, c=1.0):
    A, C = sp.Float(a), sp.Float(c)
    return _revolution(f"ellipsoid(a={a:g},c={c:g})", A * sp.cos(_u), C * sp.sin(_u),
                       [(-np.pi / 2, np.pi / 2), (0.0, 2 * np.pi)], closed=False)


@lru_cache(maxsize=None)
def torus(R0=2.0, r0=0.5):
    A, B = sp.Float(R0), sp.Float(r0)
    return _revolution(f"torus(R0={R0:g},r0={r0:g})", A + B * sp.cos(_u), B * sp.sin(_u),
                       [(0.0, 2 * np.pi), (0.0, 2 * np.pi)], closed=True)
