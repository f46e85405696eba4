"""Exception hierarchy shared by the numerical modules."""


class ReductionError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(ReductionError, ValueError):
    """Model parameters violate ``u + v != 0``, ``x > 0`` or ``n > 1``."""


class DomainError(ReductionError, ValueError):
    """A point lies outside the closed chamber."""


class InvalidPoint(ReductionError, ValueError):
    """A section point has ``z_n == 0``."""


class FactorizationFailed(ReductionError):
    """A J-Cholesky pivot vanished or had the wrong sign."""


class NotInPrimeSubset(ReductionError):
    """An Iwasawa-like factorization does not exist for the given matrix."""


class DegenerateSpectrum(ReductionError):
    """Two hyperbolic angles coincide; ``q`` is attached to the exception."""

    def __init__(self, message, q=None):
        super().__init__(message)
        self.q = q


class NotOnConstraint(ReductionError):
    """A matrix fails the momentum-constraint consistency gate."""


class PhaseRecoveryAmbiguous(ReductionError):
    """Gauge fixing could not pin the phases needed to rebuild ``z``."""


class IllConditioned(ReductionError):
    """A least-squares design matrix is rank deficient."""


class BoundaryApproach(ReductionError):
    """The Darboux integrator came too close to the chamber boundary.

    The angle chart degenerates there; use the projection engine instead.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time
