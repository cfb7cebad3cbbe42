import numpy as np
import pytest

from ncflow.errors import DegenerateSpacingError, GeometryError, SelfIntersectionError
from ncflow.geometry import (
    AxisymmetricSurface,
    DiscreteCurve,
    build,
    compute_fields,
    inradius_circumradius,
    region_distance,
)
from ncflow.geometry.region import minimal_enclosing_circle

from . import oracles

# frozen values from tests/oracles.py (independent brute force, no ncflow code)
ELLIPSE_DISTANCE_AT_1_5_0_3 = 0.3019912519804203   # 10^6 boundary samples
STAR_MIN_CURVATURE = -4.081632653061225            # dense analytic curvature of 1 + 0.3 cos 3t
STAR_INRADIUS = 0.7000000000986953                 # 2000 x 2000 grid plus local refinement


def test_circle_vertices_and_spacing():
    g = build(shape="circle", R=1, N=256)
    assert g.N == 256
    np.testing.assert_allclose(np.hypot(*g.vertices.T), 1.0, atol=1e-14)
    np.testing.assert_allclose(g.spacing(), 2 * np.sin(np.pi / 256), rtol=1e-10)


def test_ellipse_area():
    g = build(shape="ellipse", a=2, b=1, N=512)
    assert abs(g.area() / (2 * np.pi) - 1) <= 1e-4
    g.check_simple()


def test_star_is_simple_and_curvature_matches_analytic_sign():
    g = build(shape="fourier_star", coefficients=[(3, 0.3)], N=512)
    g.check_simple()
    H = compute_fields(g).H
    # with amplitude 0.3 the star is not convex: the analytic oracle has a negative minimum
    assert STAR_MIN_CURVATURE < 0
    assert abs(H.min() - STAR_MIN_CURVATURE) / abs(STAR_MIN_CURVATURE) < 1e-2
    assert np.sum(H < 0) > 0


def test_star_mean_convex_at_small_amplitude():
    g = build(shape="fourier_star", coefficients=[(3, 0.05)], N=512)
    assert compute_fields(g).H.min() > 0


def test_self_intersecting_polygon_rejected_with_segments():
    bowtie = [(0, 0), (2, 2), (2, 0), (0, 2)]
    with pytest.raises(SelfIntersectionError) as exc:
        build(shape="polygon", points=bowtie, N=16)
    assert exc.value.segments == (0, 2)


def test_degenerate_spacing_names_vertex():
    V = build(shape="circle", N=16).vertices.copy()
    V[5] = V[4]
    with pytest.raises(DegenerateSpacingError) as exc:
        DiscreteCurve(V)
    assert exc.value.index == 4


def test_clockwise_rejected():
    V = build(shape="circle", N=16).vertices[::-1]
    with pytest.raises(GeometryError):
        DiscreteCurve(V)


def test_unknown_shape_and_parameter():
    with pytest.raises(GeometryError):
        build(shape="cube")
    with pytest.raises(GeometryError):
        build(shape="circle", radius=2)


def test_circle_curvature_and_normals():
    F = compute_fields(build(shape="circle", R=1, N=512))
    np.testing.assert_allclose(F.H, 1.0, atol=1e-4)
    np.testing.assert_allclose(np.linalg.norm(F.normal, axis=1), 1.0, atol=1e-12)


def test_round_sphere_curvature_including_poles():
    g = build(shape="ellipsoid", a=1, c=1, N=128, M=32)
    F = compute_fields(g)
    np.testing.assert_allclose(F.H, 2.0, atol=1e-3)
    assert abs(F.H[0] - 2) < 1e-3 and abs(F.H[-1] - 2) < 1e-3
    np.testing.assert_allclose(F.A2, np.sum(F.principal**2, axis=1), rtol=1e-14)


def test_ellipse_vertex_curvature():
    g = build(shape="ellipse", a=2, b=1, N=512)
    F = compute_fields(g)
    i = int(np.argmax(g.vertices[:, 0]))
    # analytic curvature at (a, 0) is a / b^2
    assert abs(F.H[i] - 2.0) < 1e-3


def test_circle_curvature_is_exact():
    # the circumscribed-circle estimator is exact on inscribed regular polygons
    for N in (16, 64):
        np.testing.assert_allclose(compute_fields(build(shape="circle", R=1.5, N=N)).H, 1 / 1.5,
                                   rtol=1e-12)


@pytest.mark.parametrize("shape", [dict(shape="ellipse", a=2, b=1), dict(shape="ellipse", a=1, b=3),
                                   dict(shape="fourier_star", coefficients=[(3, 0.1)])])
def test_curvature_converges_at_second_order(shape):
    from ncflow.geometry.build import analytic_for, sample

    S = analytic_for(shape)
    errs = []
    for N in (64, 128, 256):
        g, theta = sample(shape, N=N)
        exact = np.array([S.H(np.array([t])) for t in theta])
        errs.append(np.max(np.abs(compute_fields(g).H - exact)))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios >= 3.5) & (ratios <= 4.5)), ratios


def test_round_sphere_curvature_is_exact():
    for N in (32, 128):
        np.testing.assert_allclose(compute_fields(build(shape="sphere", R=1, N=N, M=16)).H, 2,
                                   atol=1e-11)


@pytest.mark.parametrize("shape", [dict(shape="ellipsoid", a=1, c=2), dict(shape="ellipsoid", a=2, c=1)])
def test_surface_curvature_converges(shape):
    from ncflow.geometry.build import analytic_for, sample

    S = analytic_for(shape)
    errs = []
    for N in (64, 128, 256):
        g, theta = sample(shape, N=N, M=16)
        exact = np.array([S.H(np.array([t, 0.0])) for t in theta[1:-1]])
        errs.append(np.max(np.abs(compute_fields(g).H[1:-1] - exact)))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios >= 3.5) & (ratios <= 4.5)), ratios


def test_normals_point_outward_on_convex_examples():
    for d in (dict(shape="circle"), dict(shape="ellipse", a=3, b=1), dict(shape="sphere", N=64)):
        g = build(d)
        F = compute_fields(g)
        X = F.position
        assert np.all(np.einsum("ij,ij->i", F.normal, X - X.mean(axis=0) * (g.kind == "curve")) > 0)


def test_region_distance_circle():
    g = build(shape="circle", R=1, N=256)
    assert abs(region_distance(g, (0.0, 0.0)) - 1) < 1e-7
    assert abs(region_distance(g, (2.0, 0.0)) + 1) < 1e-7


def test_region_distance_ellipse_against_dense_sampling():
    g = build(shape="ellipse", a=2, b=1, N=512)
    d = region_distance(g, (1.5, 0.3))
    assert d > 0
    assert abs(d - ELLIPSE_DISTANCE_AT_1_5_0_3) < 1e-8


def test_region_distance_surface_of_revolution():
    g = build(shape="torus", R0=2, r0=0.5, N=128, M=32)
    assert abs(region_distance(g, (2.0, 0.0, 0.0)) - 0.5) < 1e-6
    assert abs(region_distance(g, (0.0, 0.0, 0.0)) + 1.5) < 1e-6
    assert abs(region_distance(g, (0.0, -2.2, 0.0)) - 0.3) < 1e-6


def test_radii():
    r_in, r_out = inradius_circumradius(build(shape="circle", R=1, N=256))
    assert abs(r_in - 1) < 1e-6 and abs(r_out - 1) < 1e-6
    r_in, r_out = inradius_circumradius(build(shape="ellipse", a=2, b=1, N=256))
    assert abs(r_in - 1) < 1e-3 and abs(r_out - 2) < 1e-3


def test_star_inradius_matches_grid_oracle():
    r = inradius_circumradius(build(shape="fourier_star", coefficients=[(3, 0.3)], N=512))
    assert abs(r.r_in - STAR_INRADIUS) < 1e-5
    assert abs(r.r_out - 1.3) < 1e-3


def test_minimal_enclosing_circle_is_exact():
    P = np.array([[0, 0], [4, 0], [2, 1], [1, -1]], dtype=float)
    c, r = minimal_enclosing_circle(P)
    assert abs(r - 2) < 1e-12
    np.testing.assert_allclose(c, [2, 0], atol=1e-12)


def test_remesh_preserves_area_and_evens_spacing():
    g = build(shape="ellipse", a=2, b=1, N=128)
    V = g.vertices.copy()
    t = np.linspace(0, 1, 128, endpoint=False)
    # squeeze the vertices towards one side without changing the image much
    stretched = DiscreteCurve(np.vstack([V[::2], V[1::8]])[np.argsort(np.r_[t[::2], t[1::8]])])
    out, _ = stretched.remesh()
    assert abs(out.area() / stretched.area() - 1) < 1e-6
    assert out.spacing_ratio() < stretched.spacing_ratio()


def test_axisym_constraints():
    P = build(shape="sphere", N=32).profile.copy()
    with pytest.raises(GeometryError):
        AxisymmetricSurface(P + [0.1, 0], "sphere")
    with pytest.raises(GeometryError):
        AxisymmetricSurface(P, "klein")


def test_oracle_module_does_not_use_the_package():
    src = open(oracles.__file__).read()
    assert "ncflow" not in src.split('"""', 2)[2]
