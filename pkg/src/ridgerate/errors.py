"""Exception hierarchy shared by every module."""


class RidgeRateError(Exception):
    """Base class for all package errors."""


class ParameterError(RidgeRateError, ValueError):
    """Inputs violate an operation's preconditions."""


class ConfigError(ParameterError):
    """An experiment configuration is malformed or inconsistent."""


class NumericalError(RidgeRateError, ArithmeticError):
    """A computation failed for numerical reasons (divergence, rank loss)."""
