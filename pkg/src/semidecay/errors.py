"""Exception types shared across the package.

``HypothesisError`` marks "the math says no" outcomes (violated
preconditions of a theorem-backed check); the CLI maps it to exit code 2,
while usage/spec errors exit 1.
"""


class SemidecayError(Exception):
    """Base class for package errors."""


class DimensionMismatchError(SemidecayError):
    """Operator and vector dimensions are incompatible."""

    def __init__(self, op_dim, x_dim):
        super().__init__(f"operator dimension {op_dim} incompatible with vector dimension {x_dim}")
        self.op_dim = op_dim
        self.x_dim = x_dim


class DomainError(SemidecayError):
    """A spectral parameter lies outside the admissible domain."""


class DivergenceError(SemidecayError):
    """A series or iteration failed to converge."""


class UnboundedTruncationError(SemidecayError):
    """A sequence-space norm was requested without a closed form or tail bound."""


class HypothesisError(SemidecayError):
    """A hypothesis of the check being run is violated."""


class OperatorSpecError(SemidecayError):
    """An operator spec file or string is malformed."""

    def __init__(self, field, message):
        super().__init__(f"bad operator spec field {field!r}: {message}")
        self.field = field
