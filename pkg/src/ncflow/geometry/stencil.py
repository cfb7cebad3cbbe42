"""Three-point stencils on non-uniform polylines.

All formulas take the previous, current and next vertex of each node and use
chord lengths as the local arclength increments.
"""

import numpy as np


def cross2(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def spacings(prev, cur, nxt):
    a = np.linalg.norm(cur - prev, axis=-1)
    b = np.linalg.norm(nxt - cur, axis=-1)
    return a, b


def circumcircle_curvature(prev, cur, nxt):
    """Signed curvature of the circle through three points.

    Positive when the turn prev -> cur -> nxt is counterclockwise.
    """
    a, b = spacings(prev, cur, nxt)
    c = np.linalg.norm(nxt - prev, axis=-1)
    return 2.0 * cross2(cur - prev, nxt - cur) / (a * b * c)


def quadratic_tangent(prev, cur, nxt):
    """Unit tangent from the derivative of the quadratic interpolant at `cur`."""
    a, b = spacings(prev, cur, nxt)
    t = ((a * a)[:, None] * (nxt - cur) + (b * b)[:, None] * (cur - prev))
    return t / np.linalg.norm(t, axis=-1)[:, None]


def first_derivative(u_prev, u, u_next, a, b):
    return (a * a * (u_next - u) + b * b * (u - u_prev)) / (a * b * (a + b))


def second_derivative(u_prev, u, u_next, a, b):
    return 2.0 * (a * (u_next - u) - b * (u - u_prev)) / (a * b * (a + b))
