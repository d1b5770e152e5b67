"""Exception hierarchy shared by every slicekit module."""


class SliceKitError(Exception):
    """Base class for all slicekit errors."""


class ContractError(SliceKitError, ValueError):
    """A documented precondition of an operation was violated."""


class SingularInputError(SliceKitError, ZeroDivisionError):
    """Inversion of a zero (or numerically zero) element."""


class SingularKernelError(SliceKitError, ValueError):
    """A reproducing kernel was evaluated on its singular set."""


class SingularPointError(SliceKitError, ValueError):
    """A Moebius transformation was evaluated at its pole."""


class DomainError(SliceKitError, ValueError):
    """A point lies outside the domain of a map or operator."""


class DegeneracyError(SliceKitError, ValueError):
    """A map is not a local diffeomorphism at the requested point."""


class UnsupportedDimensionError(SliceKitError, ValueError):
    """The operation is only defined for a specific dimension."""


class EvaluationError(SliceKitError, ArithmeticError):
    """An integrand or evaluator produced a non-finite value."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ConfigError(SliceKitError, ValueError):
    """Malformed run configuration."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
