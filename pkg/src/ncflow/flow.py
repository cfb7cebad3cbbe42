"""Explicit mean curvature flow for plane curves and surfaces of revolution.

Every vertex moves with velocity -H nu (nu outward). An optional positive
scalar f is advanced alongside by one explicit step of

    df/dt = Laplace(f) + |A|^2 f

on the same geometry and time step.
"""

from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np

from .errors import (
    FlowError,
    GeometryError,
    InvariantViolation,
    NotMeanConvexError,
    SelfIntersectionError,
    StabilityError,
)

TIME_LIMIT = "time-limit"
H_BLOWUP = "H-blowup"
INVARIANT_VIOLATION = "invariant-violation"
TERMINATION_REASONS = (TIME_LIMIT, H_BLOWUP, INVARIANT_VIOLATION)


@dataclass(frozen=True)
class FlowConfig:
    """Time stepping, termination and snapshot cadence.

    Parameters
    ----------
    c_stab : curvature cap, dt <= c_stab / max|A|^2.
    c_diff : diffusion cap; 0.5 corresponds to the monotone limit of the
        explicit Laplacian (0.5 h^2 on a uniform curve).
    step_safety : fraction of the admissible dt taken by `evolve`.
    H_cap : absolute blowup threshold on max H; if None it is
        `H_cap_factor` times the initial max H.
    snapshot_dt : time between snapshots (None: 1/50 of t_end).
    snapshot_H_ratio : also snapshot whenever max H grew by this factor
        since the previous snapshot (resolves the approach to the singularity).
    """

    c_stab: float = 0.2
    c_diff: float = 0.5
    step_safety: float = 0.9
    H_cap: Optional[float] = None
    H_cap_factor: float = 1e3
    remesh: bool = True
    remesh_ratio: float = 3.0
    snapshot_dt: Optional[float] = None
    snapshot_H_ratio: Optional[float] = 1.25
    check_simple: bool = True
    max_steps: int = 10_000_000

    def __post_init__(self):
        for name in ("c_stab", "c_diff", "step_safety", "H_cap_factor", "remesh_ratio"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.step_safety > 1:
            raise ValueError("step_safety must be <= 1")
        if self.H_cap is not None and not self.H_cap > 0:
            raise ValueError("H_cap must be positive")
        if self.snapshot_dt is not None and not self.snapshot_dt > 0:
            raise ValueError("snapshot_dt must be positive")
        if self.snapshot_H_ratio is not None and not self.snapshot_H_ratio > 1:
            raise ValueError("snapshot_H_ratio must exceed 1")


@dataclass(frozen=True)
class FlowState:
    """One time slice: geometry, time, step index and the optional f field.

    `remesh_count` counts remeshing events since the start of the run, so two
    states with equal counts share material vertices.
    """

    geometry: object
    t: float = 0.0
    step: int = 0
    f: Optional[np.ndarray] = None
    remesh_count: int = 0

    @property
    def fields(self):
        return self.geometry.fields().with_f(self.f)

    @property
    def kind(self):
        return self.geometry.kind

    def weight(self):
        """f in f-field mode, otherwise H."""
        return self.fields.weight(self.f is not None)


@dataclass
class Trajectory:
    snapshots: List[FlowState]
    reason: str
    message: str = ""
    steps: int = 0
    H_cap: float = float("inf")
    config: FlowConfig = field(default_factory=FlowConfig)

    def __len__(self):
        return len(self.snapshots)

    def __iter__(self):
        return iter(self.snapshots)

    def __getitem__(self, i):
        return self.snapshots[i]

    @property
    def times(self):
        return np.array([s.t for s in self.snapshots])

    @property
    def final(self):
        return self.snapshots[-1]

    def until(self, fraction):
        """Snapshots with t <= fraction * (final time)."""
        T = self.snapshots[-1].t
        return [s for s in self.snapshots if s.t <= fraction * T]


def initial_state(geometry, f0=None):
    f = None
    if f0 is not None:
        f = np.array(f0, dtype=float)
        if f.shape != (geometry.N,):
            raise ValueError(f"f0 must have one value per vertex ({geometry.N}), got {f.shape}")
    return FlowState(geometry, 0.0, 0, f, 0)


def stable_dt(geometry, config=None, with_f=False):
    """Largest admissible dt and the name of the binding bound."""
    cfg = config or FlowConfig()
    F = geometry.fields()
    a2 = float(np.max(F.A2))
    curv = cfg.c_stab / a2 if a2 > 0 else np.inf
    diff = (cfg.c_diff / 0.5) * geometry.diffusion_limit()
    if curv <= diff:
        return curv, "curvature (c_stab / max|A|^2)"
    return diff, "diffusion (c_diff * spacing^2)"


def _advance(state, dt, cfg):
    g = state.geometry
    F = g.fields()
    moved = g.moved(-dt * F.H[:, None] * F.normal)
    f = None
    if state.f is not None:
        f = state.f + dt * (g.laplacian(state.f) + F.A2 * state.f)
    count = state.remesh_count
    if cfg.remesh and moved.needs_remesh(cfg.remesh_ratio):
        moved, f = moved.remesh(extra=f)
        count += 1
    return FlowState(moved, state.t + dt, state.step + 1, f, count)


def _check_dt(state, dt, cfg):
    if not dt > 0:
        raise StabilityError(dt, stable_dt(state.geometry, cfg)[0], "positivity (dt > 0)")
    bound, which = stable_dt(state.geometry, cfg)
    if dt > bound * (1 + 1e-12):
        raise StabilityError(dt, bound, which)


def mcf_step(state, dt, config=None):
    """Advance by one explicit MCF step of size dt (and f, if carried).

    Raises StabilityError if dt exceeds the admissible bound and
    InvariantViolation if mean convexity is lost (outside f-field mode).
    """
    cfg = config or FlowConfig()
    if state.f is not None:
        return f_step(state, dt, cfg)
    _check_dt(state, dt, cfg)
    new = _advance(state, dt, cfg)
    H = new.geometry.fields().H
    if np.min(H) <= 0:
        i = int(np.argmin(H))
        raise InvariantViolation(f"mean convexity lost at t={new.t:.6g}: H[{i}] = {H[i]:.3e}")
    return new


def f_step(state, dt, config=None):
    """Coupled step: geometry by MCF and f by df/dt = Laplace(f) + |A|^2 f."""
    cfg = config or FlowConfig()
    if state.f is None:
        raise ValueError("f_step requires a state carrying an f field")
    if not np.min(state.f) > 0:
        raise ValueError(f"f must be positive, min f = {np.min(state.f):.3e}")
    _check_dt(state, dt, cfg)
    new = _advance(state, dt, cfg)
    if not np.min(new.f) > 0:
        i = int(np.argmin(new.f))
        raise InvariantViolation(f"f lost positivity at t={new.t:.6g}: f[{i}] = {new.f[i]:.3e}")
    return new


def evolve(initial, t_end=None, config=None, f0=None):
    """Run the flow from `initial` (a geometry, a FlowState or a Scenario).

    Terminates at t_end (time-limit), when max H exceeds the cap (H-blowup)
    or on an invariant violation (the last valid state is kept).
    """
    if hasattr(initial, "initial_state"):
        scenario = initial
        initial = scenario.initial_state()
        t_end = scenario.t_end if t_end is None else t_end
        config = scenario.flow_config() if config is None else config
    cfg = config or FlowConfig()
    state = initial if isinstance(initial, FlowState) else initial_state(initial, f0)
    if t_end is None or t_end < 0:
        raise ValueError("t_end must be a non-negative time")
    H0 = state.geometry.fields().H
    if state.f is None and np.min(H0) <= 0:
        i = int(np.argmin(H0))
        raise NotMeanConvexError(
            f"initial data is not mean-convex (H[{i}] = {H0[i]:.3e}); enable the f-field mode")
    if state.f is not None and not np.min(state.f) > 0:
        raise ValueError("f0 must be positive")
    H_cap = cfg.H_cap if cfg.H_cap is not None else cfg.H_cap_factor * float(np.max(H0))
    snap_dt = cfg.snapshot_dt or (t_end / 50 if t_end > 0 else 1.0)

    snaps = [state]
    next_t = state.t + snap_dt
    last_H = float(np.max(H0))
    reason, message = TIME_LIMIT, ""
    steps = 0
    while state.t < t_end:
        if steps >= cfg.max_steps:
            raise FlowError(f"step limit {cfg.max_steps} reached at t={state.t:.6g}")
        dt = cfg.step_safety * stable_dt(state.geometry, cfg)[0]
        finishing = state.t + dt >= t_end
        if finishing:
            dt = t_end - state.t
        try:
            new = mcf_step(state, dt, cfg)
        except (InvariantViolation, GeometryError) as exc:
            reason, message = INVARIANT_VIOLATION, str(exc)
            break
        steps += 1
        if finishing:
            new = replace(new, t=t_end)
        Hmax = float(np.max(new.geometry.fields().H))
        blowup = Hmax > H_cap
        due = (new.t >= next_t or finishing or blowup
               or (cfg.snapshot_H_ratio is not None and Hmax >= cfg.snapshot_H_ratio * last_H))
        if due and cfg.check_simple:
            try:
                new.geometry.check_simple()
            except SelfIntersectionError as exc:
                reason, message = INVARIANT_VIOLATION, f"t={new.t:.6g}: {exc}"
                break
        state = new
        if due:
            snaps.append(state)
            last_H = Hmax
            while next_t <= state.t:
                next_t += snap_dt
        if blowup:
            reason, message = H_BLOWUP, f"max H = {Hmax:.6g} exceeds the cap {H_cap:.6g}"
            break
    if snaps[-1] is not state:
        snaps.append(state)
    return Trajectory(snaps, reason, message, steps, H_cap, cfg)
