"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class DynPRError(Exception):
    exit_code = 1


class ConfigError(DynPRError, ValueError):
    """Invalid parameter or configuration."""

    exit_code = 1


class DomainError(DynPRError, ValueError):
    """Argument outside the domain of an operation (time, k, gamma, ...)."""

    exit_code = 1


class ParseError(DynPRError, ValueError):
    exit_code = 2

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class ConvergenceError(DynPRError, RuntimeError):
    exit_code = 3

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class NumericError(DynPRError, FloatingPointError):
    """NaN/Inf in the state, or step-size underflow in the integrator."""

    exit_code = 3

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time
