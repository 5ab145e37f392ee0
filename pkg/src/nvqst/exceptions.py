"""Exception hierarchy shared by every module of the package."""


class QSTError(Exception):
    """Base class for all errors raised by nvqst."""


class UsageError(QSTError, ValueError):
    """A caller passed arguments outside an operation's domain."""


class ValidationError(QSTError, ValueError):
    """An input object violates a structural invariant (Hermiticity, unitarity, ...)."""


class NumericError(QSTError, ArithmeticError):
    pass


class CalibrationError(QSTError):
    """Readout calibration is unusable, e.g. non-positive contrast."""


class CompilationError(QSTError):
    """A conversion plan cannot be realized with the available pulse primitives."""


class IncompleteRunError(QSTError):
    pass


class FitError(QSTError):
    pass


class ConfigError(QSTError):
    """Raised by the config parser; carries the offending field path or JSON line."""
