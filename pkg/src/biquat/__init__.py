"""Biquaternion algebra, bigradients and biwave solvers for Maxwell and Dirac type systems."""
from .algebra import (
    BASIS,
    E1,
    E2,
    E3,
    ONE,
    ZERO,
    Biquaternion,
    commutator,
    inverse,
    mutual,
    norm,
    pseudonorm,
    scalar_product,
)
from .errors import (
    BiquatError,
    DegenerateAxis,
    InvalidVelocity,
    NegativeTime,
    NonInvertible,
    OutOfDomain,
    ParseError,
    QuadratureBudgetExceeded,
    UnsupportedMass,
    ZeroWaveNumber,
    ZeroWaveVector,
)
from .transforms import Boost, PoincareOp, Rotor, SpacetimePoint

__version__ = "0.1.0"
