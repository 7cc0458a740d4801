from typing import Any, Optional


class LindynError(Exception):
    pass


class InvalidInput(LindynError):
    pass


class ZeroVector(InvalidInput):
    pass


class NonFiniteValue(InvalidInput):
    pass


class NotUnimodular(InvalidInput):
    pass


class NotSelfMap(InvalidInput):
    pass


class DegenerateMap(InvalidInput):
    pass


class GridTooCoarse(InvalidInput):
    pass


class UnknownLaw(InvalidInput):
    pass


class NumericalFailure(LindynError):
    pass


class ConvergenceFailure(NumericalFailure):
    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class BudgetExhausted(NumericalFailure):
    def __init__(self, message: str, bound: Optional[int] = None):
        super().__init__(message)
        self.bound = bound


class InconsistentVerdicts(NumericalFailure):
    pass


class CertificationFailure(NumericalFailure):
    pass


class UndecidableError(LindynError):
    """
    Raised when a presentation cannot be resolved at the configured tolerances.

    `partial` holds the strongest verdict that could still be proved, if any.
    """

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial


class UnresolvedCriterion(UndecidableError):
    pass


class IoFailure(LindynError):
    pass
