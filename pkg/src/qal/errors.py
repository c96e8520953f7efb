"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class QalError(Exception):
    """Base class for all package errors."""


class ConfigError(QalError, ValueError):
    """Invalid or inconsistent configuration (CLI exit code 1)."""


class DataError(QalError, ValueError):
    """Malformed or inconsistent input data (CLI exit code 2)."""


class NumericalError(QalError, ArithmeticError):
    """A numerical routine failed (CLI exit code 3)."""


class NotPositiveDefiniteError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass
