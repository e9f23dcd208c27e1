"""Exception types shared across the toolkit."""


class CatKerrError(Exception):
    """Base class for all toolkit errors."""


class TruncationError(CatKerrError):
    """Fock-space truncation too small for the requested state or operator.

    Carries ``suggested_n``, the smallest truncation that would satisfy the
    adequacy guard, when one can be computed.
    """

    def __init__(self, message, suggested_n=None):
        super().__init__(message)
        self.suggested_n = suggested_n


class DimensionMismatchError(CatKerrError):
    """Operands live on different Hilbert spaces."""


class IllConditionedBasisError(CatKerrError):
    """The two coherent basis states overlap too strongly to define a qubit."""


class ConvergenceError(CatKerrError):
    """An iterative solver failed to reach its tolerance."""


class StiffnessError(CatKerrError):
    """Adaptive step size underflowed; the problem is too stiff for the stepper."""


class AccuracyError(CatKerrError):
    """A trajectory violated its trace/Hermiticity accuracy budget."""
