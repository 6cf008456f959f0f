"""Exception types shared across the package."""


class IndefSLError(Exception):
    """Base class for all package errors."""


class NonConvergence(IndefSLError):
    """Simultaneous root iteration did not converge."""


class InvalidBands(IndefSLError, ValueError):
    """Band edges or divisor points violate the interlacing rules."""


class DivisionRemainder(IndefSLError):
    """(R + Q^2) is not divisible by P to working precision."""


class TauOutOfGap(IndefSLError):
    """A root of S lies outside its admissible gap."""


class NotHerglotz(IndefSLError):
    """The constructed Weyl function fails the Herglotz screen."""


class ComplexResidue(IndefSLError):
    """A point mass came out with a non-negligible imaginary part."""


class PoleHit(IndefSLError):
    """Evaluation point coincides with a real pole."""

    def __init__(self, theta, side, mass=None):
        self.theta = theta
        self.side = side
        self.mass = mass
        super().__init__(f"pole of M{side} at {theta!r}")


class WindingMismatch(IndefSLError):
    """Root counts from the polynomial and the argument principle disagree."""


class QuadratureDivergenceUndecided(IndefSLError):
    """Refinement growth sits between the convergent and divergent thresholds."""


class OrderUnresolved(IndefSLError):
    """A local order could not be rounded to a half-integer with confidence."""


class DegenerateD(IndefSLError):
    """M+ - M- vanishes at the evaluation point."""


class NonIntegrable(IndefSLError):
    """A weight or its reciprocal is not locally integrable."""


class TailDivergence(IndefSLError):
    """A density does not decay fast enough for the requested transform."""


class QuadratureFailure(IndefSLError):
    """Adaptive quadrature failed to converge."""


class SolveFailure(IndefSLError):
    """A shifted linear system was singular."""


class ModulusOutOfRange(IndefSLError, ValueError):
    """Elliptic modulus outside [0, 1)."""
