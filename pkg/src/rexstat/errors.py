"""Exception types shared across the package."""


class RexError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RexError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class ConvergenceError(RexError, ArithmeticError):
    """An iterative evaluation did not converge within its iteration cap."""


class EmptyInputError(RexError, ValueError):
    """A nonempty data vector or matrix was required."""


class DimensionMismatchError(RexError, ValueError):
    """Two inputs have incompatible shapes."""


class ZeroNormColumnError(RexError, ValueError):
    """A vector that must be normalized has zero Euclidean norm.

    ``index`` is the offending design-column index, or None when the
    response vector itself is degenerate.
    """

    def __init__(self, index, message=None):
        self.index = index
        if message is None:
            what = "response vector" if index is None else f"design column {index}"
            message = f"cannot normalize {what}: zero Euclidean norm"
        super().__init__(message)


class ParseError(RexError, ValueError):
    """A CSV input failed to parse; ``line`` is the 1-based line number."""

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class DegenerateSampleError(RexError, ValueError):
    """A sample without enough spread for the requested computation."""
