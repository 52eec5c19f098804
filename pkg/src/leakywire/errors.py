"""Exception hierarchy shared across the package."""


class LeakyWireError(Exception):
    """Base class for all package errors."""


class BranchCutError(LeakyWireError):
    """Argument touches the branch cut on the nonnegative real energy axis."""


class DomainError(LeakyWireError):
    """Argument outside the documented domain of a special function."""


class ThresholdError(LeakyWireError):
    """Evaluation at (or numerically on top of) a spectral threshold."""


class PoleOnPathError(LeakyWireError):
    """The integrand denominator vanishes on the real integration path.

    Raised by the physical-sheet kernels when the energy sits in or too
    close to the guided-channel continuum; the sheet-aware continuation
    must be used instead.
    """


class QuadratureConvergenceError(LeakyWireError):
    """Subdivision budget exhausted with the error estimate above tolerance."""


class PoleAtEndpointError(LeakyWireError):
    """Principal-value pole located at or beyond an integration endpoint."""


class RegionError(LeakyWireError):
    """Point lies outside the implemented second-sheet region."""


class ConvergenceError(LeakyWireError):
    """A root or pole iteration failed to converge."""


class EvaluationAtSingularityError(LeakyWireError):
    """Pointwise evaluation requested at a logarithmic singularity."""


class ContourError(LeakyWireError):
    """Winding-number contour passes too close to a zero."""


class ConfigError(LeakyWireError):
    """Invalid run configuration (CLI or service request)."""


class PrecisionExhaustedError(LeakyWireError):
    """A reference oracle cannot reach its guaranteed accuracy."""
