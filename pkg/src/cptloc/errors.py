"""Exception hierarchy shared by every cptloc module."""


class CPTLocError(Exception):
    """Base class for all errors raised by cptloc."""


class InvalidArgumentError(CPTLocError, ValueError):
    pass


class DegenerateInputError(CPTLocError, ValueError):
    """Raised when Omega_p = Omega_s(x) = 0, where the dark state is undefined."""


class NoPeaksError(CPTLocError, ValueError):
    """Raised when a profile has no localization peak with a defined half width."""


class ResolutionError(CPTLocError, ValueError):
    """Raised when a sampled profile is too coarse to bracket a half-maximum crossing."""


class OutOfDomainError(CPTLocError, ValueError):
    pass


class NumericalInstabilityError(CPTLocError, ArithmeticError):
    """Raised when a density matrix leaves the physical set during integration."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ConfigParseError(CPTLocError):
    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class ConfigValidationError(CPTLocError, ValueError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
