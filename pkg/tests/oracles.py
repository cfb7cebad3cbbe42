"""Independent reference computations used to freeze expected values.

Nothing here imports ncflow. Curves and the torus are sampled from their
exact parametrizations with exact normals and curvatures, and every pair is
visited by brute force. Run ``python3 tests/oracles.py`` to reprint the
frozen constants used in the tests.
"""

import numpy as np


def ellipse(a, b, n):
    t = 2 * np.pi * np.arange(n) / n
    X = np.column_stack([a * np.cos(t), b * np.sin(t)])
    nu = np.column_stack([b * np.cos(t), a * np.sin(t)])
    nu /= np.linalg.norm(nu, axis=1)[:, None]
    kappa = a * b / (a**2 * np.sin(t) ** 2 + b**2 * np.cos(t) ** 2) ** 1.5
    return X, nu, kappa


def star(n, k=3, eps=0.3):
    """Polar graph r = 1 + eps cos(k t)."""
    t = 2 * np.pi * np.arange(n) / n
    r = 1 + eps * np.cos(k * t)
    r1 = -eps * k * np.sin(k * t)
    r2 = -eps * k * k * np.cos(k * t)
    X = np.column_stack([r * np.cos(t), r * np.sin(t)])
    dX = np.column_stack([r1 * np.cos(t) - r * np.sin(t), r1 * np.sin(t) + r * np.cos(t)])
    speed = np.linalg.norm(dX, axis=1)
    nu = np.column_stack([dX[:, 1], -dX[:, 0]]) / speed[:, None]
    kappa = (r * r + 2 * r1 * r1 - r * r2) / speed**3
    return X, nu, kappa


def torus(R0, r0, n, m):
    """Sources on the meridian at azimuth 0, targets on the full n x m torus."""
    phi = 2 * np.pi * np.arange(n) / n
    rho = R0 + r0 * np.cos(phi)
    z = r0 * np.sin(phi)
    X = np.column_stack([rho, np.zeros(n), z])
    nu = np.column_stack([np.cos(phi), np.zeros(n), np.sin(phi)])
    k1 = np.full(n, 1.0 / r0)
    k2 = np.cos(phi) / rho
    th = 2 * np.pi * np.arange(m) / m
    Y = np.column_stack([(rho[:, None] * np.cos(th)).ravel(), (rho[:, None] * np.sin(th)).ravel(),
                         np.repeat(z, m)])
    same = np.arange(n) * m          # target index of source i
    return X, nu, np.column_stack([k1, k2]), Y, same


def pair_extremum(X, nu, w, Y, same, mode, chunk=256):
    """Brute-force extremum of the pair ratios w d^2 / (-+2 <D, nu>)."""
    best = np.inf if mode != "enclosure" else -np.inf
    for s in range(0, len(X), chunk):
        rows = np.arange(s, min(s + chunk, len(X)))
        D = Y[None, :, :] - X[rows, None, :]
        d2 = np.einsum("ijk,ijk->ij", D, D)
        inner = np.einsum("ijk,ik->ij", D, nu[rows])
        with np.errstate(divide="ignore", invalid="ignore"):
            if mode == "exterior":
                r = np.where(inner > 0, w[rows, None] * d2 / (2 * inner), np.inf)
            else:
                r = np.where(inner < 0, w[rows, None] * d2 / (-2 * inner),
                             np.inf if mode == "interior" else -np.inf)
        r[np.arange(len(rows)), same[rows]] = np.inf if mode != "enclosure" else -np.inf
        best = min(best, r.min()) if mode != "enclosure" else max(best, r.max())
    return float(best)


def certificate(X, nu, w, principal, Y, same, mode):
    """Pair extremum combined with the coincident-pair limit from exact curvatures."""
    principal = np.atleast_2d(principal.T).T
    lmax, lmin = principal.max(axis=1), principal.min(axis=1)
    v = pair_extremum(X, nu, w, Y, same, mode)
    with np.errstate(divide="ignore"):
        if mode == "interior":
            return min(v, float(np.min(np.where(lmax > 0, w / lmax, np.inf))))
        if mode == "exterior":
            return min(v, float(np.min(np.where(lmin < 0, w / -lmin, np.inf))))
        return max(v, float(np.max(w / lmin)))


def ellipse_certificate(mode, n=4096, a=2.0, b=1.0):
    X, nu, k = ellipse(a, b, n)
    return certificate(X, nu, k, k, X, np.arange(n), mode)


def star_exterior_f(n=4096):
    """Exterior certificate of the star with the support function as weight."""
    X, nu, k = star(n)
    f = np.einsum("ij,ij->i", X, nu)
    return certificate(X, nu, f, k, X, np.arange(n), "exterior")


def torus_certificate(mode, n=512, m=256, R0=2.0, r0=0.5):
    X, nu, P, Y, same = torus(R0, r0, n, m)
    return certificate(X, nu, P.sum(axis=1), P, Y, same, mode)


def star_min_curvature(n=200_000):
    return float(star(n)[2].min())


def star_inradius(grid=2000, n=200_000):
    """Largest inscribed circle of the star: 2000 x 2000 grid, then local grid refinement."""
    B, _, _ = star(n)

    def dist(p):
        # the region is star-shaped about the origin: inside iff |p| < r(angle p)
        d = np.min(np.linalg.norm(B[None, :, :] - p[:, None, :], axis=2), axis=1)
        th = np.arctan2(p[:, 1], p[:, 0])
        inside = np.hypot(p[:, 0], p[:, 1]) < 1 + 0.3 * np.cos(3 * th)
        return np.where(inside, d, -d)

    g = np.linspace(-1.3, 1.3, grid)
    # coarse grid distances from a decimated boundary, then exact distances near the best cells
    Bc = B[:: n // 2000]
    best, best_p = -np.inf, None
    for row in g:
        p = np.column_stack([g, np.full(grid, row)])
        d = np.min(np.linalg.norm(Bc[None, :, :] - p[:, None, :], axis=2), axis=1)
        th = np.arctan2(p[:, 1], p[:, 0])
        d = np.where(np.hypot(p[:, 0], p[:, 1]) < 1 + 0.3 * np.cos(3 * th), d, -d)
        i = int(np.argmax(d))
        if d[i] > best:
            best, best_p = d[i], p[i]
    step = g[1] - g[0]
    p = best_p
    for _ in range(40):
        s = np.linspace(-step, step, 9)
        cand = (p + np.stack(np.meshgrid(s, s), -1).reshape(-1, 2))
        d = dist(cand)
        p = cand[int(np.argmax(d))]
        step /= 2
    return float(dist(p[None])[0])


def ellipse_distance(point, a=2.0, b=1.0, n=1_000_000):
    X, _, _ = ellipse(a, b, n)
    d = float(np.min(np.linalg.norm(X - np.asarray(point), axis=1)))
    inside = (point[0] / a) ** 2 + (point[1] / b) ** 2 < 1
    return d if inside else -d


if __name__ == "__main__":
    print("ellipse interior", repr(ellipse_certificate("interior")))
    print("ellipse enclosure", repr(ellipse_certificate("enclosure")))
    print("star exterior f", repr(star_exterior_f()))
    print("star min curvature", repr(star_min_curvature()))
    print("torus interior", repr(torus_certificate("interior")))
    print("torus exterior", repr(torus_certificate("exterior")))
    print("ellipse distance (1.5, 0.3)", repr(ellipse_distance((1.5, 0.3))))
    print("star inradius", repr(star_inradius()))
