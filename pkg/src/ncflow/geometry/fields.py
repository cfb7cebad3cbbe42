from dataclasses import dataclass, replace
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class VertexFields:
    """Per-vertex geometric fields.

    For plane curves `position`, `normal` and `tangent` are planar vectors.
    For surfaces of revolution they live in the meridian half-plane (r, z);
    `principal` then holds (profile, azimuthal) curvatures.
    `grad_H` is the arclength derivative of H along `tangent`.
    """

    position: np.ndarray
    normal: np.ndarray
    tangent: np.ndarray
    H: np.ndarray
    principal: np.ndarray
    A2: np.ndarray
    grad_H: np.ndarray
    lap_H: np.ndarray
    f: Optional[np.ndarray] = None

    @property
    def lam_max(self):
        return self.principal.max(axis=1)

    @property
    def lam_min(self):
        return self.principal.min(axis=1)

    def with_f(self, f):
        return replace(self, f=None if f is None else np.asarray(f, dtype=float))

    def weight(self, use_f=False):
        """The positive scalar that plays the role of H in the certificates."""
        if use_f:
            if self.f is None:
                raise ValueError("no f field attached")
            return self.f
        return self.H
