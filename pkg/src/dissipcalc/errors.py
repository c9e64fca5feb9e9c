"""Exception types shared across the package."""


class DissipcalcError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(DissipcalcError, ValueError):
    """Rejected input: a precondition on an argument does not hold."""


class DimensionMismatchError(ValidationError):
    """Operands have incompatible shapes."""


class KernelError(DissipcalcError, ArithmeticError):
    """A numerical kernel could not produce a result within contract."""


class SingularMatrixError(KernelError):
    """LU elimination met a pivot below the singularity threshold."""


class EigenvalueOneError(SingularMatrixError):
    """I - T is numerically singular: 1 is an eigenvalue of the contraction."""


class OverflowRangeError(KernelError):
    """Input norm exceeds the scaling budget of the kernel."""


class ConvergenceError(KernelError):
    """An iterative kernel hit its iteration cap far from its target."""


class InternalConsistencyError(DissipcalcError):
    """A condition guaranteed by validated inputs failed; indicates a bug."""


class ConfigError(DissipcalcError, ValueError):
    """Malformed experiment configuration.

    Carries the offending line number and field when known.
    """

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field '{field}'")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.line = line
        self.field = field
