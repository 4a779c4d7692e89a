"""Exception hierarchy shared by all zcorr modules."""


class ZcorrError(Exception):
    """Base class for every error raised by zcorr."""


class DomainError(ZcorrError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class CapacityError(ZcorrError):
    """The request exceeds a documented size cap."""


class ContractError(ZcorrError, TypeError):
    """Operands are structurally incompatible (e.g. different generator sets)."""


class NotInvertibleError(ZcorrError, ZeroDivisionError):
    """A Grassmann element with vanishing scalar part was inverted."""


class SingularPivotError(ZcorrError):
    """Elimination found no pivot with a nonzero scalar part."""


class IllConditionedError(ZcorrError):
    """Point configuration too close to coincident for a reliable A^{-1}."""

    def __init__(self, message, condition):
        super().__init__(message)
        self.condition = condition


class NotPositiveDefiniteError(ZcorrError):
    """A covariance matrix failed its Cholesky factorization."""


class ConsistencyError(ZcorrError):
    """An internal cross-check failed (e.g. a large imaginary residue)."""


class EnsembleError(ZcorrError):
    """Too many trials of a polynomial-ensemble run were discarded."""
