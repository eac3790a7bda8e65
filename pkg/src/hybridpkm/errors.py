"""Exception hierarchy shared by the kinematics, planning and simulation code."""


class KinematicsError(Exception):
    """Base class for every failure raised by this package."""


class ConfigError(KinematicsError, ValueError):
    """Configuration text could not be parsed or violates an invariant."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class NoRealSolution(KinematicsError):
    """A square root of a negative discriminant was required."""

    def __init__(self, message, leg=None):
        super().__init__(message)
        self.leg = leg


class SingularInput(KinematicsError):
    """Closed form divides by a joint value that is zero."""

    def __init__(self, message, leg=None):
        super().__init__(message)
        self.leg = leg


class Singular(KinematicsError):
    """A Jacobian denominator fell below the singularity tolerance.

    ``block`` names where it happened: ``"wrist"``, ``"translation"`` or
    ``"coupling"``.
    """

    def __init__(self, message, leg=None, block=None):
        super().__init__(message)
        self.leg = leg
        self.block = block


class JointLimit(KinematicsError):
    def __init__(self, message, joint=None):
        super().__init__(message)
        self.joint = joint


class TiltLimit(KinematicsError):
    pass


class WorkspaceExit(KinematicsError):
    """Planned path leaves the workspace; ``t`` is the first offending time."""

    def __init__(self, message, t=None, reason=None):
        super().__init__(message)
        self.t = t
        self.reason = reason


class GCodeError(KinematicsError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class UnsupportedCode(GCodeError):
    pass


class MalformedWord(GCodeError):
    pass


class DegenerateCorner(GCodeError):
    """Junction with no blend arc (straight continuation or full reversal)."""


class Shutdown(KinematicsError):
    """Tracking error exceeded the shutdown threshold; ``trace`` keeps the data."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
