"""Mean curvature flow of curves and surfaces of revolution with non-collapsing certificates."""

from .errors import (
    DegenerateSpacingError,
    FlowError,
    GeometryError,
    InvariantViolation,
    NcflowError,
    NotMeanConvexError,
    ScenarioError,
    SelfIntersectionError,
    SnapshotError,
    StabilityError,
    UnsupportedConfiguration,
)
from .flow import FlowConfig, FlowState, Trajectory, evolve, f_step, initial_state, mcf_step, stable_dt
from .geometry import (
    AxisymmetricSurface,
    DiscreteCurve,
    build,
    compute_fields,
    inradius_circumradius,
    region_distance,
)
from .noncollapse import (
    NoncollapseReport,
    analyze,
    certify,
    enclosure_delta,
    exterior_delta_star,
    interior_delta_star,
    min_z,
    pinching_spectrum,
    touching_ball_check,
    z_value,
)
from .scenario import Scenario, load_scenario, parse_scenario

__version__ = "0.1.0"
