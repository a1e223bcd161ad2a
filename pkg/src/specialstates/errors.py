"""Exception types raised by the package."""


class InvalidParameterError(ValueError):
    """A model or run parameter is outside its allowed range."""


class ContractViolation(ValueError):
    """An input does not satisfy an operation's precondition
    (non-Hermitian matrix, unnormalized state, wrong dimension)."""


class ConvergenceError(RuntimeError):
    """The eigensolver failed to converge."""
