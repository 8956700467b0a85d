"""Exception types raised across the package."""


class FracFemError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(FracFemError, ValueError):
    pass


class NumericError(FracFemError, ArithmeticError):
    pass


class DivergentIntegralError(NumericError):
    pass


class SingularMatrixError(NumericError):
    pass


class ConvergenceError(NumericError):
    pass


class UnsupportedExpressionError(FracFemError, ValueError):
    pass


class ExprParseError(FracFemError, ValueError):
    """Syntax error in a function expression; ``position`` is a 0-based offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position
