# rmtlab/utils/errors.py - Error kinds raised by the services

from typing import Any, Dict, Optional


class RMTLabError(Exception):
    """Base class; `detail` is the user-facing message, `context` carries diagnostics."""

    def __init__(self, detail: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(detail)
        self.detail = detail
        self.context = context or {}

    def __str__(self) -> str:
        if not self.context:
            return self.detail
        extras = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{self.detail} ({extras})"


class DimensionError(RMTLabError, ValueError):
    pass


class PreconditionError(RMTLabError, ValueError):
    pass


class DomainError(RMTLabError, ValueError):
    pass


class RangeError(RMTLabError, ValueError):
    pass


class NumericalError(RMTLabError):
    pass


class AccuracyError(NumericalError):
    """Quadrature could not reach the requested tolerance; context holds the achieved estimate."""


class IntegrationError(NumericalError):
    """ODE step size underflow; context holds the last good abscissa."""


class PoleError(RMTLabError):
    pass


class RegimeError(RMTLabError):
    """Inputs fall outside the hypotheses of the requested asymptotic formula."""


class DegeneracyError(NumericalError):
    pass


class DivergenceError(RMTLabError):
    pass


class ModeError(RMTLabError):
    pass


class SolverError(NumericalError):
    pass


class IntegrityError(RMTLabError):
    pass


class StepError(NumericalError):
    pass
