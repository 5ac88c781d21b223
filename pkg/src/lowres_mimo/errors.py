"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An input violates a documented precondition."""


class NumericalError(ArithmeticError):
    """A numerical routine failed to converge or produced an invalid value."""
