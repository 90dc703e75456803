"""Exception types shared across the toolkit."""


class NonFinite(ArithmeticError):
    """A state, right-hand side, or derived quantity contains NaN/Inf."""


class StepSizeUnderflow(ArithmeticError):
    """Adaptive stepper could not meet tolerances above its dt floor."""


class DimensionMismatch(ValueError):
    """Operands live on charts of different dimension."""


class SteeringOutOfRange(ValueError):
    """Car steering angle left the open chart interval (-pi/4, pi/4)."""


class DomainExceeded(ValueError):
    """A curve parameter left the domain the path is defined on."""


class SingularGram(ArithmeticError):
    """Constraint Gram matrix is singular; multipliers are undetermined."""


class NegativeDensity(ArithmeticError):
    """Fluid density dropped to or below the positivity floor."""


class UnknownColumn(KeyError):
    """A referenced trajectory column does not exist."""
