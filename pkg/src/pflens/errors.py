"""Exception hierarchy.

Two broad classes matter to callers: input/validation problems
(DomainError and subclasses, CLI exit code 2) and numerical failures
(NumericalError and subclasses, CLI exit code 3).
"""


class PflensError(Exception):
    """Base class for all package errors."""


class DomainError(PflensError, ValueError):
    """An input violates a documented precondition or invariant."""


class ConfigError(DomainError):
    """A configuration file failed validation.

    Carries the offending key and line number when known.
    """

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"key '{key}': "
        super().__init__(prefix + message)


class SchemaError(DomainError):
    """A data file does not match the expected CSV schema."""


class NumericalError(PflensError, RuntimeError):
    """A numerical procedure failed to produce a trustworthy result."""


class FitError(NumericalError):
    """A least-squares fit did not converge or is degenerate.

    The final residual (when available) is attached for diagnosis.
    """

    def __init__(self, message, residual=None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (final residual {residual:.3e})"
        super().__init__(message)


class ResolutionError(NumericalError):
    """A numerical grid is too coarse for the requested computation."""


class AccuracyError(NumericalError):
    """A quadrature or iteration failed to reach the requested accuracy.

    The best available estimate is attached.
    """

    def __init__(self, message, estimate=None):
        self.estimate = estimate
        super().__init__(message)
