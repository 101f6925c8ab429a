"""Exception hierarchy shared by every qgforge module."""


class QGError(Exception):
    """Base class for all qgforge errors."""


class ConstructionError(QGError, ValueError):
    """A Cayley table could not be turned into a magma (bad shape or entry)."""


class AxiomError(QGError):
    """An operation needs a quasigroup axiom the magma does not satisfy."""


class PreconditionError(QGError, ValueError):
    """Inputs violate a documented precondition."""


class DomainError(PreconditionError):
    """Arguments fall outside the quantification domain of an identity."""


class CapacityError(QGError):
    """A requested order exceeds a configured ceiling."""


class ConsistencyError(QGError, RuntimeError):
    """A guaranteed property failed after construction.

    Either the implementation has a bug or the inputs were invalid in a way
    the validators did not catch.
    """


class SearchExhausted(QGError):
    """A sampler could not satisfy its constraints."""
