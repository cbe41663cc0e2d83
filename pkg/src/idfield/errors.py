"""Exception hierarchy shared by all modules."""


class IdFieldError(Exception):
    """Base class for every error raised by :mod:`idfield`."""


class DomainError(IdFieldError, ValueError):
    """An argument lies outside the domain of an operation."""


class DivergenceError(IdFieldError):
    """A measure or integral that must be finite is not.

    ``component`` names the offending part of the triplet, e.g. ``"jumps[1]"``.
    """

    def __init__(self, component, message):
        super().__init__(f"{component}: {message}")
        self.component = component


class QuadratureError(IdFieldError, ArithmeticError):
    """A quadrature did not reach its tolerance. ``estimate`` holds the error estimate."""

    def __init__(self, message, estimate=None):
        super().__init__(message if estimate is None else f"{message} (error estimate {estimate:.3e})")
        self.estimate = estimate


class ConfigurationError(DomainError):
    """Invalid model or simulation configuration.

    ``path`` is the dotted path to the offending field (``"triplet.jumps[0].levy.c"``).
    """

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
