"""Exception types raised across the package."""


class IonTomoError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(IonTomoError, ValueError):
    pass


class ContractViolation(IonTomoError, ValueError):
    """An input violates a documented precondition (e.g. non-Hermitian)."""


class SpaceMismatchError(IonTomoError, ValueError):
    pass


class ClosedFormNotApplicable(IonTomoError, ValueError):
    """The closed-form propagator only exists for zero detuning."""


class ZeroProbabilityBranch(IonTomoError, ValueError):
    pass


class DegenerateCatError(IonTomoError, ValueError):
    pass


class InvalidProbabilityError(IonTomoError, ValueError):
    pass


class InfeasibleControlError(IonTomoError, ValueError):
    pass


class UndefinedAngleError(IonTomoError, ValueError):
    pass


class EmptyGridError(IonTomoError, ValueError):
    pass


class ConfigError(IonTomoError, ValueError):
    pass
