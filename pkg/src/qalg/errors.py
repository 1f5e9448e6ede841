"""Exception hierarchy shared by all modules."""


class QalgError(Exception):
    """Base class for every error raised by :mod:`qalg`."""


class DimensionError(QalgError, ValueError):
    """Operands have incompatible or unsupported dimensions."""


class NotHermitianError(QalgError, ValueError):
    """An observable was required but the element is not hermitian."""


class NotPositiveError(QalgError, ValueError):
    """A positive semidefinite element was required."""


class NumericalError(QalgError, ArithmeticError):
    """An eigensolver or other numerical routine failed."""


class ContextualityError(QalgError, ValueError):
    """Observables that do not commute were asked to share a context."""


class IrrelevantStateError(QalgError, ValueError):
    """A physical state was evaluated on an observable outside its context."""


class ModelInvariantError(QalgError, AssertionError):
    """A model-level invariant (anticorrelation, non-reuse, ...) was violated."""


class GnsCheckError(ModelInvariantError):
    """A GNS verification check failed.

    Attributes
    ----------
    check : str
        Name of the failing check.
    error : float
        Largest deviation observed for that check.
    """

    def __init__(self, check, error, tol):
        self.check = check
        self.error = error
        self.tol = tol
        super().__init__(f"GNS check {check!r} failed: error {error:.3e} > {tol:.1e}")
