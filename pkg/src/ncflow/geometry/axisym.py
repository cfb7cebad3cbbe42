"""Surfaces of revolution about the z-axis, stored as meridian profiles.

Sphere-type profiles run from the south pole to the north pole with r > 0 in
between; torus-type profiles are closed counterclockwise loops in r > 0.
"""

from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from ..errors import DegenerateSpacingError, GeometryError, SelfIntersectionError
from . import stencil
from .curve import (REMESH_RATIO, _DENSE, _readonly, _simple_fast, periodic_resample, polygon_area,
                    segments_intersections)
from .fields import VertexFields

TOPOLOGIES = ("sphere", "torus")
_GHOSTS = 3


def _frustum_volume(P, closed):
    r, z = P[:, 0], P[:, 1]
    r1, z1 = (np.roll(r, -1), np.roll(z, -1)) if closed else (r[1:], z[1:])
    r0, z0 = (r, z) if closed else (r[:-1], z[:-1])
    return float(np.pi / 3.0 * np.sum((z1 - z0) * (r0 * r0 + r0 * r1 + r1 * r1)))


def _frustum_area(P, closed):
    Q = np.roll(P, -1, axis=0) if closed else P[1:]
    P0 = P if closed else P[:-1]
    return float(np.sum(np.pi * (P0[:, 0] + Q[:, 0]) * np.linalg.norm(Q - P0, axis=1)))


class AxisymmetricSurface:
    kind = "axisym"
    n = 2
    ambient = 3

    def __init__(self, profile, topology="sphere", M=64):
        if topology not in TOPOLOGIES:
            raise GeometryError(f"unknown topology {topology!r}")
        P = np.array(profile, dtype=float)
        if P.ndim != 2 or P.shape[1] != 2 or len(P) < 8:
            raise GeometryError(f"expected (N>=8, 2) profile, got shape {P.shape}")
        if int(M) < 3:
            raise GeometryError("need at least 3 azimuthal samples")
        self.topology = topology
        self.M = int(M)
        closed = topology == "torus"
        if closed:
            if np.any(P[:, 0] <= 0):
                raise GeometryError("torus-type profile must have r > 0 everywhere")
        else:
            if abs(P[0, 0]) > 1e-9 or abs(P[-1, 0]) > 1e-9:
                raise GeometryError("sphere-type profile must start and end on the axis")
            P[0, 0] = 0.0
            P[-1, 0] = 0.0
            if np.any(P[1:-1, 0] <= 0):
                raise GeometryError("sphere-type profile must have r > 0 away from the poles")
        seg = np.linalg.norm(np.diff(np.vstack([P, P[:1]]) if closed else P, axis=0), axis=1)
        bad = np.nonzero(seg <= 1e-14 * seg.max())[0]
        if len(bad):
            raise DegenerateSpacingError(bad[0])
        if polygon_area(P) <= 0:
            raise GeometryError("profile must be counterclockwise in the (r, z) half-plane")
        self._p = _readonly(P)

    @property
    def closed(self):
        return self.topology == "torus"

    @property
    def profile(self):
        return self._p

    @property
    def vertices(self):
        return self._p

    @property
    def N(self):
        return len(self._p)

    def __repr__(self):
        return f"AxisymmetricSurface({self.topology}, N={self.N}, M={self.M})"

    # -- measures -------------------------------------------------------
    def spacing(self):
        P = self._p
        Q = np.vstack([P, P[:1]]) if self.closed else P
        return np.linalg.norm(np.diff(Q, axis=0), axis=1)

    def spacing_ratio(self):
        s = self.spacing()
        return float(s.max() / s.min())

    def mean_spacing(self):
        return float(self.spacing().mean())

    def min_spacing(self):
        return float(self.spacing().min())

    def volume(self):
        return _frustum_volume(self._p, self.closed)

    def surface_area(self):
        return _frustum_area(self._p, self.closed)

    def enclosed_measure(self):
        return self.volume()

    def boundary_measure(self):
        return self.surface_area()

    def isoperimetric_ratio(self):
        """A^3 / (36 pi V^2); equals 1 on round spheres."""
        return self.surface_area() ** 3 / (36.0 * np.pi * self.volume() ** 2)

    # -- differential quantities -----------------------------------------
    def _neighbours(self, u=None):
        """prev/cur/next arrays with mirror ghosts at the poles."""
        P = self._p if u is None else u
        if self.closed:
            return np.roll(P, 1, axis=0), P, np.roll(P, -1, axis=0)
        prev = np.empty_like(P)
        nxt = np.empty_like(P)
        prev[1:] = P[:-1]
        nxt[:-1] = P[1:]
        if u is None:
            prev[0] = (-P[1, 0], P[1, 1])
            nxt[-1] = (-P[-2, 0], P[-2, 1])
        else:
            prev[0] = P[1]
            nxt[-1] = P[-2]
        return prev, P, nxt

    def _spacings(self):
        prev, cur, nxt = self._neighbours()
        return stencil.spacings(prev, cur, nxt)

    @cached_property
    def _fields(self):
        prev, cur, nxt = self._neighbours()
        a, b = stencil.spacings(prev, cur, nxt)
        k_prof = stencil.circumcircle_curvature(prev, cur, nxt)
        T = stencil.quadratic_tangent(prev, cur, nxt)
        nu = np.column_stack([T[:, 1], -T[:, 0]])
        r = cur[:, 0]
        k_az = np.empty_like(k_prof)
        on_axis = r <= 0.0
        k_az[~on_axis] = nu[~on_axis, 0] / r[~on_axis]
        k_az[on_axis] = k_prof[on_axis]
        if not self.closed:
            nu[0] = (0.0, -1.0)
            nu[-1] = (0.0, 1.0)
            T[0] = (1.0, 0.0)
            T[-1] = (-1.0, 0.0)
        H = k_prof + k_az
        hp, _, hn = self._neighbours(H)
        principal = np.column_stack([k_prof, k_az])
        return VertexFields(
            position=self._p,
            normal=nu,
            tangent=T,
            H=H,
            principal=principal,
            A2=k_prof**2 + k_az**2,
            grad_H=stencil.first_derivative(hp, H, hn, a, b),
            lap_H=self.laplacian(H),
        )

    def fields(self):
        return self._fields

    @cached_property
    def _laplace_coeffs(self):
        a, b = self._spacings()
        prev, cur, nxt = self._neighbours()
        r = cur[:, 0]
        rm = 0.5 * (np.abs(prev[:, 0]) + r)
        rp = 0.5 * (r + np.abs(nxt[:, 0]))
        cell = 0.5 * r * (a + b)
        with np.errstate(divide="ignore", invalid="ignore"):
            cp = rp / b / cell
            cm = rm / a / cell
        if not self.closed:
            # pole cell is a disc of radius b/2 around the axis point
            cp[0], cm[0] = 4.0 / b[0] ** 2, 0.0
            cp[-1], cm[-1] = 0.0, 4.0 / a[-1] ** 2
        return cm, cp

    def laplacian(self, u):
        """Finite-volume Laplace-Beltrami operator for axisymmetric scalars."""
        u = np.asarray(u, dtype=float)
        cm, cp = self._laplace_coeffs
        up, _, un = self._neighbours(u)
        return cp * (un - u) - cm * (u - up)

    def diffusion_limit(self):
        cm, cp = self._laplace_coeffs
        return float(1.0 / np.max(cm + cp))

    # -- 3D realization -----------------------------------------------------
    @cached_property
    def _realization(self):
        P = self._p
        phi = 2.0 * np.pi * np.arange(self.M) / self.M
        c, s = np.cos(phi), np.sin(phi)
        pts, prof, az = [], [], []
        for i, (r, z) in enumerate(P):
            if r == 0.0:
                pts.append([[0.0, 0.0, z]])
                prof.append([i])
                az.append([0])
            else:
                pts.append(np.column_stack([r * c, r * s, np.full(self.M, z)]))
                prof.append(np.full(self.M, i))
                az.append(np.arange(self.M))
        Y = np.vstack(pts)
        prof = np.concatenate(prof)
        az = np.concatenate(az)
        Y.flags.writeable = False
        return Y, prof, az

    def realize(self):
        """3D points, their profile indices and azimuth indices."""
        return self._realization

    def lift(self, v, azimuth=0):
        """Lift meridian (r, z) vectors into 3D at azimuth index `azimuth`."""
        v = np.atleast_2d(v)
        phi = 2.0 * np.pi * azimuth / self.M
        return np.column_stack([v[:, 0] * np.cos(phi), v[:, 0] * np.sin(phi), v[:, 1]])

    def pair_sources(self):
        f = self.fields()
        return self.lift(self._p), self.lift(f.normal), np.arange(self.N)

    def pair_targets(self):
        Y, prof, az = self._realization
        src = np.where(az == 0, prof, -1)
        return Y, src

    @cached_property
    def boundary(self):
        """Spline through the closed meridian section (profile plus mirror image)."""
        from .region import SplineBoundary, meridian_section

        return SplineBoundary(meridian_section(self._p, self.closed))

    def region_distance(self, points):
        """Signed distance (positive inside) from 3D points, or meridian (r, z) points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] == 3:
            pts = np.column_stack([np.hypot(pts[:, 0], pts[:, 1]), pts[:, 2]])
        else:
            pts = np.column_stack([np.abs(pts[:, 0]), pts[:, 1]])
        return self.boundary.signed_distance(pts)

    def boundary_frame(self, points):
        """Outward normal (3D) and meridian curvature of the continuous surface near 3D `points`."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        rho = np.hypot(pts[:, 0], pts[:, 1])
        n, kappa = self.boundary.frame(np.column_stack([rho, pts[:, 2]]))
        phi = np.arctan2(pts[:, 1], pts[:, 0])
        return np.column_stack([n[:, 0] * np.cos(phi), n[:, 0] * np.sin(phi), n[:, 1]]), kappa

    # -- invariants -------------------------------------------------------
    def check_simple(self):
        P = self._p
        closed = self.closed
        if _simple_fast(P, closed) and (closed or np.all(P[1:-1, 0] > 0)):
            return
        A = P if closed else P[:-1]
        B = np.roll(P, -1, axis=0) if closed else P[1:]
        m = len(A)

        def adjacent(i, j):
            same = (j == i) | (j == i + 1)
            return same | ((i == 0) & (j == m - 1)) if closed else same

        hit = segments_intersections(A, B, adjacent)
        if hit is not None:
            raise SelfIntersectionError(*hit)
        if closed or np.all(P[1:-1, 0] > 0):
            raise SelfIntersectionError(-1, -1, message="profile is not simple (touching vertices)")
        if not closed and np.any(P[1:-1, 0] <= 0):
            i = int(np.nonzero(P[1:-1, 0] <= 0)[0][0]) + 1
            raise SelfIntersectionError(i - 1, i, message=f"profile crosses the axis at vertex {i}")

    # -- transformations --------------------------------------------------
    def moved(self, displacement):
        P = self._p + displacement
        if not self.closed:
            P[0, 0] = P[-1, 0] = 0.0
        return AxisymmetricSurface(P, self.topology, self.M)

    def transformed(self, scale=1.0, shift_z=0.0):
        P = self._p * scale
        P[:, 1] += shift_z
        return AxisymmetricSurface(P, self.topology, self.M)

    def needs_remesh(self, ratio=REMESH_RATIO):
        return self.spacing_ratio() > ratio

    def remesh(self, extra=None, N=None, preserve_area=True):
        """Uniform-arclength resampling of the profile; volume preserved by a normal offset."""
        N = N or self.N
        vol = self.volume()
        if self.closed:
            P, ex = periodic_resample(self._p, N, extra)
        else:
            P, ex = _open_resample(self._p, N, extra)
        out = AxisymmetricSurface(P, self.topology, self.M)
        if preserve_area:
            for _ in range(2):
                eps = (vol - out.volume()) / out.surface_area()
                out = out.moved(eps * out.fields().normal)
        return out, ex


def _open_spline(P):
    """Cubic spline through the profile and its mirror images across the axis."""
    g = _GHOSTS
    left = P[1:g + 1][::-1] * [-1.0, 1.0]
    right = P[-g - 1:-1][::-1] * [-1.0, 1.0]
    ext = np.vstack([left, P, right])
    u = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(ext, axis=0), axis=1))])
    return CubicSpline(u, ext), u


def _open_resample(P, N, extra):
    g = _GHOSTS
    spline, u = _open_spline(P)
    u0, u1 = u[g], u[g + len(P) - 1]
    uu = np.linspace(u0, u1, _DENSE * len(P) + 1)
    dense = spline(uu)
    cum = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(dense, axis=0), axis=1))])
    u_new = np.interp(cum[-1] * np.arange(N) / (N - 1), cum, uu)
    u_new[0], u_new[-1] = u0, u1
    out = spline(u_new)
    out[0, 0] = out[-1, 0] = 0.0
    if extra is None:
        return out, None
    ex = np.asarray(extra, dtype=float)
    ex_ext = np.concatenate([ex[1:g + 1][::-1], ex, ex[-g - 1:-1][::-1]], axis=0)
    return out, CubicSpline(u, ex_ext)(u_new)
