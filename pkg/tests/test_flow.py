import dataclasses

import numpy as np
import pytest

from ncflow.errors import NotMeanConvexError, StabilityError
from ncflow.flow import (
    H_BLOWUP,
    TIME_LIMIT,
    FlowConfig,
    evolve,
    f_step,
    initial_state,
    mcf_step,
    stable_dt,
)
from ncflow.geometry import build


def _radius(g):
    return float(np.mean(np.linalg.norm(g.vertices - g.centroid(), axis=1)))


def test_single_circle_step():
    g = build(shape="circle", R=1, N=256)
    dt = 0.5 * stable_dt(g)[0]
    s = mcf_step(initial_state(g), dt)
    R = np.linalg.norm(s.geometry.vertices, axis=1)
    assert s.t == dt and s.step == 1
    # exact R = sqrt(1 - 2 dt); explicit Euler error is O(dt^2)
    np.testing.assert_allclose(R, np.sqrt(1 - 2 * dt), atol=2 * dt * dt)


def test_area_loss_rate_of_curves():
    # dA/dt = -2 pi for every embedded closed curve, up to O(h^2) discretization error
    for d in (dict(shape="ellipse", a=2, b=1), dict(shape="circle", R=0.5),
              dict(shape="fourier_star", coefficients=[(3, 0.1)])):
        errs = []
        for N in (256, 512):
            g = build(d, N=N)
            dt = 0.5 * stable_dt(g)[0]
            s = mcf_step(initial_state(g), dt)
            errs.append(abs(s.geometry.area() - g.area() + 2 * np.pi * dt) / dt)
        assert errs[0] <= 1e-2 and errs[1] < errs[0]


def test_stability_precondition():
    g = build(shape="circle", N=64)
    with pytest.raises(StabilityError) as exc:
        mcf_step(initial_state(g), 10 * stable_dt(g)[0])
    assert "dt <=" in str(exc.value)
    with pytest.raises(StabilityError):
        mcf_step(initial_state(g), 0.0)


def test_circle_trajectory_tracks_exact_radius():
    traj = evolve(build(shape="circle", R=1, N=256), t_end=0.45)
    assert traj.reason == TIME_LIMIT
    assert traj.final.t == 0.45
    assert abs(_radius(traj.final.geometry) / np.sqrt(0.1) - 1) < 1e-3
    assert np.all(np.diff(traj.times) > 0)


def test_sphere_radius():
    R0 = 1.0
    t = 0.8 * R0**2 / 4
    traj = evolve(build(shape="sphere", R=R0, N=128, M=16), t_end=t)
    P = traj.final.geometry.profile
    R = np.mean(np.linalg.norm(P - [0, P[:, 1].mean()], axis=1))
    assert abs(R / np.sqrt(R0**2 - 4 * t) - 1) < 1e-3


def test_error_decreases_with_refinement():
    errs = []
    for N in (32, 64):
        g = evolve(build(shape="circle", R=1, N=N), t_end=0.2).final.geometry
        errs.append(abs(_radius(g) - np.sqrt(0.6)))
    assert errs[1] < errs[0]


def test_length_and_area_decrease():
    traj = evolve(build(shape="ellipse", a=2, b=1, N=128), t_end=0.3)
    L = [s.geometry.length() for s in traj]
    A = [s.geometry.area() for s in traj]
    assert np.all(np.diff(L) < 0) and np.all(np.diff(A) < 0)
    traj = evolve(build(shape="ellipsoid", a=1, c=1.5, N=48, M=16), t_end=0.05)
    S = [s.geometry.surface_area() for s in traj]
    assert np.all(np.diff(S) < 0)


def test_blowup_termination():
    traj = evolve(build(shape="circle", R=0.5, N=64), t_end=1.0, config=FlowConfig(H_cap=20.0))
    assert traj.reason == H_BLOWUP
    assert traj.final.t < 0.125
    assert traj.final.geometry.fields().H.max() > 20.0


def test_zero_time_gives_single_snapshot():
    traj = evolve(build(shape="circle", N=64), t_end=0.0)
    assert len(traj) == 1 and traj.reason == TIME_LIMIT


def test_non_mean_convex_rejected_without_f():
    star = build(shape="fourier_star", coefficients=[(3, 0.3)], N=128)
    with pytest.raises(NotMeanConvexError):
        evolve(star, t_end=0.01)


def test_disjoint_concentric_circles_stay_disjoint():
    inner = evolve(build(shape="circle", R=0.8, N=128), t_end=0.3, config=FlowConfig(snapshot_dt=0.05))
    outer = evolve(build(shape="circle", R=1.0, N=128), t_end=0.3, config=FlowConfig(snapshot_dt=0.05))
    for a, b in zip(inner, outer):
        assert np.max(np.linalg.norm(a.geometry.vertices, axis=1)) < np.min(
            np.linalg.norm(b.geometry.vertices, axis=1))


def test_f_equal_H_stays_H_on_the_circle():
    g = build(shape="circle", R=1, N=128)
    traj = evolve(initial_state(g, g.fields().H), t_end=0.3)
    for s in traj:
        exact = 1 / np.sqrt(1 - 2 * s.t)
        assert np.max(np.abs(s.f - exact)) / exact < 1e-3


def test_constant_f_on_the_sphere_solves_the_ode():
    # f' = |A|^2 f with |A|^2 = 2 / R(t)^2 and R^2 = R0^2 - 4t integrates to
    # f = c (R0^2 / (R0^2 - 4t))^(1/2)
    R0, c, t = 1.0, 0.7, 0.1
    g = build(shape="sphere", R=R0, N=64, M=16)
    traj = evolve(initial_state(g, np.full(g.N, c)), t_end=t)
    exact = c * np.sqrt(R0**2 / (R0**2 - 4 * t))
    assert np.max(np.abs(traj.final.f - exact)) / exact < 2e-3


def test_f_positivity_is_preserved():
    g = build(shape="fourier_star", coefficients=[(3, 0.3)], N=128)
    f0 = np.einsum("ij,ij->i", g.vertices, g.fields().normal)
    traj = evolve(initial_state(g, f0), t_end=0.05)
    assert all(np.min(s.f) > 0 for s in traj)


def test_f_step_preconditions():
    g = build(shape="circle", N=64)
    with pytest.raises(ValueError):
        f_step(initial_state(g), 1e-5)
    with pytest.raises(ValueError):
        f_step(initial_state(g, np.zeros(g.N)), 1e-5)
    with pytest.raises(StabilityError):
        f_step(initial_state(g, np.ones(g.N)), 10 * stable_dt(g)[0])


def test_config_validation():
    with pytest.raises(ValueError):
        FlowConfig(c_stab=0)
    with pytest.raises(ValueError):
        FlowConfig(step_safety=1.5)
    assert dataclasses.replace(FlowConfig(), c_stab=0.1).c_stab == 0.1


def test_determinism():
    a = evolve(build(shape="ellipse", a=2, b=1, N=64), t_end=0.1)
    b = evolve(build(shape="ellipse", a=2, b=1, N=64), t_end=0.1)
    assert np.array_equal(a.final.geometry.vertices, b.final.geometry.vertices)
