"""Discrete and analytic hypersurfaces: plane curves and surfaces of revolution."""

from dataclasses import dataclass

import numpy as np

from .axisym import AxisymmetricSurface
from .build import analytic_for, build, sample
from .curve import DiscreteCurve
from .fields import VertexFields
from .region import maximize_distance, medial_seeds, minimal_enclosing_circle

__all__ = [
    "AxisymmetricSurface",
    "DiscreteCurve",
    "Radii",
    "VertexFields",
    "analytic_for",
    "build",
    "compute_fields",
    "inradius_circumradius",
    "region_distance",
    "sample",
]


def compute_fields(geometry):
    """Curvatures, normals and derived H fields of a discrete geometry."""
    return geometry.fields()


def region_distance(geometry, point):
    """Signed distance to the hypersurface, positive inside the enclosed region.

    Accepts a single point or an array of points; returns a float or an array.
    """
    p = np.asarray(point, dtype=float)
    d = geometry.region_distance(np.atleast_2d(p))
    return float(d[0]) if p.ndim == 1 else d


@dataclass(frozen=True)
class Radii:
    r_in: float
    r_out: float
    center_in: np.ndarray
    center_out: np.ndarray

    def __iter__(self):
        return iter((self.r_in, self.r_out))


def _seeded(geometry, lo, hi):
    from .region import meridian_section

    if geometry.kind == "curve":
        P = geometry.vertices
    else:
        P = meridian_section(geometry.profile, geometry.closed)
    return medial_seeds(P, lo, hi), 2.0 * geometry.mean_spacing()


def inradius_circumradius(geometry, grid=16, starts=2):
    """Radius of the maximal inscribed ball and of the minimal enclosing ball.

    The inscribed ball is searched from medial-axis seeds (Voronoi vertices
    of the polygon vertices) plus a coarse grid, then refined locally.
    For surfaces of revolution both centres are reported in the meridian
    half-plane (r, z); the enclosing ball is centred on the axis.
    """
    if geometry.kind == "curve":
        V = geometry.vertices
        c_out, r_out = minimal_enclosing_circle(V)
        lo, hi = V.min(axis=0), V.max(axis=0)
        seeds, step = _seeded(geometry, lo, hi)
        c_in, r_in = maximize_distance(geometry.region_distance, lo, hi, grid, starts, seeds, step)
        return Radii(r_in, r_out, c_in, c_out)
    P = geometry.profile
    mirrored = np.vstack([P, P * [-1.0, 1.0]])
    c_out, r_out = minimal_enclosing_circle(mirrored)
    c_out = np.array([0.0, c_out[1]])
    r_out = float(np.max(np.hypot(P[:, 0], P[:, 1] - c_out[1])))

    dist = geometry.region_distance
    lo = np.array([0.0, P[:, 1].min()])
    hi = np.array([P[:, 0].max(), P[:, 1].max()])
    seeds, step = _seeded(geometry, lo, hi)
    c_in, r_in = maximize_distance(dist, lo, hi, grid, starts, seeds, step)
    c_in = np.array([abs(c_in[0]), c_in[1]])
    return Radii(r_in, r_out, c_in, c_out)
