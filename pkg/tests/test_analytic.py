import numpy as np
import pytest

from ncflow.geometry import analytic

SURFACES = [analytic.circle(1.0), analytic.ellipse(2.0, 1.0), analytic.sphere(1.0),
            analytic.ellipsoid(1.0, 2.0), analytic.torus(2.0, 0.5),
            analytic.fourier_star(((3, 0.3),), 1.0)]
POINTS = {1: np.array([0.7]), 2: np.array([0.3, 1.1])}


@pytest.mark.parametrize("S", SURFACES, ids=repr)
def test_finite_differences_of_X_converge_at_second_order(S):
    p = POINTS[S.n]
    for k in range(S.n):
        e = np.zeros(S.n)
        e[k] = 1.0
        errs = []
        for h in (1e-2, 5e-3):
            fd = (S.X(p + h * e) - S.X(p - h * e)) / (2 * h)
            errs.append(np.linalg.norm(fd - S.dX(p)[k]))
        assert 3.5 <= errs[0] / errs[1] <= 4.5


@pytest.mark.parametrize("S", SURFACES, ids=repr)
def test_normal_is_unit_and_orthogonal(S):
    p = POINTS[S.n]
    nu = S.nu(p)
    assert abs(np.linalg.norm(nu) - 1) < 1e-14
    assert np.max(np.abs(S.dX(p) @ nu)) < 1e-14


def test_round_values():
    assert abs(analytic.circle(2.0).H(np.array([0.4])) - 0.5) < 1e-14
    assert abs(analytic.sphere(2.0).H(np.array([0.4, 1.0])) - 1.0) < 1e-14
    # ellipse curvature at (a, 0) is a / b^2, at (0, b) it is b / a^2
    E = analytic.ellipse(2.0, 1.0)
    assert abs(E.H(np.array([0.0])) - 2.0) < 1e-13
    assert abs(E.H(np.array([np.pi / 2])) - 0.25) < 1e-13


def test_local_data_on_the_torus():
    T = analytic.torus(2.0, 0.5)
    L = T.local(np.array([0.0, 0.3]))
    # outer equator: profile curvature 1/r0 and azimuthal 1/(R0 + r0)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(L.h)), [1 / 2.5, 2.0], atol=1e-13)
    assert abs(L.H - 2.4) < 1e-13
    assert abs(L.A2 - (4 + 1 / 6.25)) < 1e-12
    np.testing.assert_allclose(L.frame @ L.frame.T, np.eye(2), atol=1e-14)


def test_geodesic_curve_has_unit_speed():
    S = analytic.ellipsoid(1.0, 2.0)
    p = np.array([0.2, 0.5])
    v = np.array([0.6, 0.8])
    h = 1e-4
    a, b = S.curve_param(p, v, h), S.curve_param(p, v, -h)
    speed = np.linalg.norm(S.X(a) - S.X(b)) / (2 * h)
    assert abs(speed - 1) < 1e-6
