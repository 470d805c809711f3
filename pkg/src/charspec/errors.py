"""Exception types shared across the package.

Everything numeric that can fail in a structured way raises one of these
instead of returning NaNs, so callers (and the CLI exit-code mapping) can
tell configuration mistakes apart from genuine convergence failures.
"""


class CharspecError(Exception):
    """Base class for all package-specific errors."""


class ConvergenceError(CharspecError):
    """Base for failures to produce a certified numeric result."""


class NoTailBound(ConvergenceError):
    """The sequence has no usable tail summability bound."""


class TolUnreachable(ConvergenceError):
    """The requested tolerance cannot be certified within resource limits."""


class Diverges(ConvergenceError):
    """The defining series is not absolutely convergent for this input."""


class NoConvergenceCertificate(ConvergenceError):
    """The operator data does not satisfy any implemented convergence test."""


class InvalidZ0(CharspecError):
    """The reference point z0 coincides with (or is too close to) a pole."""


class PoleAt(CharspecError):
    """Evaluation was requested exactly at a pole of the function.

    Carries the offending index when known.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class AccumulationPoint(CharspecError):
    """The point lies in the declared derived/accumulation set."""


class WindowTouchesAccumulation(CharspecError):
    """A search window's closure meets the declared accumulation set."""


class NearSpectrum(CharspecError):
    """z is numerically indistinguishable from a spectral point."""


class SingularAtZ(CharspecError):
    """The characteristic function vanishes at z, so division by it fails."""


class HypothesisFailed(CharspecError):
    """A stated precondition of an identity or theorem does not hold."""


class LostTrack(CharspecError):
    """Eigenvalue continuation lost its branch between parameter steps."""


class QuadratureFailure(ConvergenceError):
    """Numerical integration did not reach the requested accuracy."""


class PoleOfGamma(CharspecError):
    """Gamma evaluated at a nonpositive integer."""


class PochhammerZero(CharspecError):
    """A q-Pochhammer factor in a denominator vanished."""


class DomainError(CharspecError):
    """Arguments outside the mathematical domain of the function."""


class BadParams(CharspecError):
    """Malformed or inconsistent descriptor/family parameters."""


class BoundViolated(CharspecError):
    """An a-priori bound check failed (internal consistency guard)."""
