"""Exception and warning types shared by all modules."""


class BiquatError(Exception):
    """Base class for errors raised by this package."""


class NonInvertible(BiquatError, ZeroDivisionError):
    """Raised when a biquaternion has (F, F) = 0, so no inverse exists."""


class InvalidVelocity(BiquatError, ValueError):
    """Raised for boost velocities with |v| >= 1."""


class OutOfDomain(BiquatError, ValueError):
    """Raised when a derivative stencil or solve leaves the field's domain."""


class QuadratureBudgetExceeded(BiquatError, RuntimeError):
    """Raised when the requested tolerance is not met at the configured node counts."""


class ZeroWaveVector(BiquatError, ValueError):
    """Raised for an elementary spinor with wave vector xi = 0."""


class ZeroWaveNumber(BiquatError, ValueError):
    """Raised when k = |omega + rho| vanishes."""


class UnsupportedMass(BiquatError, ValueError):
    """Raised when a homogeneous part is requested with Re m != 0."""


class ParseError(BiquatError, ValueError):
    """Raised on malformed input records.

    ``lineno`` is the 1-based line of the offending record, when known.
    """

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class DegenerateAxis(RuntimeWarning):
    """A composed rotor is +-identity and has no well-defined axis."""


class NegativeTime(RuntimeWarning):
    """Retarded convolution requested at tau <= 0; the result is zero."""
