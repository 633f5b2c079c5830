class EitsimError(Exception):
    """Base class for all package errors."""


class UnphysicalParameterError(EitsimError, ValueError):
    """A rate, efficiency or attenuation factor outside its physical range."""


class InvalidStateError(EitsimError, ValueError):
    """A matrix that is not a valid density matrix (or the wrong shape)."""


class ScheduleError(EitsimError, ValueError):
    """A coupling schedule that violates its contiguity/positivity rules."""


class SingularityError(EitsimError, ArithmeticError):
    """The g1/g2 denominator vanished."""


class QuadratureError(EitsimError, ArithmeticError):
    """Adaptive quadrature hit its depth limit before meeting the tolerance."""

    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


class IntegrationError(EitsimError, ArithmeticError):
    """The adaptive ODE integrator could not advance."""


class BracketError(EitsimError, ValueError):
    """A root-finding bracket does not enclose a sign change."""


class DimensionError(EitsimError, ValueError):
    """Fock register too large, or operands on mismatched grids."""
