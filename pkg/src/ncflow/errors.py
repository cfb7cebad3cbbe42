"""Exception hierarchy shared by the geometry, flow and analysis layers."""


class NcflowError(Exception):
    pass


class GeometryError(NcflowError, ValueError):
    pass


class SelfIntersectionError(GeometryError):
    def __init__(self, i, j, message=None):
        self.segments = (int(i), int(j))
        super().__init__(message or f"segments {i} and {j} intersect")


class DegenerateSpacingError(GeometryError):
    def __init__(self, index):
        self.index = int(index)
        super().__init__(f"vertex {index} coincides with its successor")


class NotMeanConvexError(NcflowError, ValueError):
    pass


class FlowError(NcflowError):
    pass


class StabilityError(FlowError, ValueError):
    def __init__(self, dt, dt_max, reason):
        self.dt = dt
        self.dt_max = dt_max
        super().__init__(f"dt={dt:.3e} violates the {reason} bound; use dt <= {dt_max:.3e}")


class InvariantViolation(FlowError):
    pass


class UnsupportedConfiguration(NcflowError, NotImplementedError):
    pass


class ScenarioError(NcflowError, ValueError):
    """Invalid scenario file; `line` and `key` locate the problem when known."""

    def __init__(self, message, line=None, key=None, source=None):
        self.line = line
        self.key = key
        self.source = source
        where = source or "<scenario>"
        if line is not None:
            where = f"{where}:{line}"
        if key is not None:
            where = f"{where} [{key}]"
        super().__init__(f"{where}: {message}")


class SnapshotError(NcflowError, ValueError):
    """Missing or unreadable snapshot file."""
