"""Exception hierarchy.

Configuration problems derive from ``ValueError`` and numerical failures
from ``ArithmeticError`` so callers can catch them with builtin types; the
CLI maps the two groups to exit codes 2 and 3.
"""


class OrthantVarError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(OrthantVarError, ValueError):
    """Invalid input: bad parameter, domain violation, unsupported request."""


class DomainError(ConfigError):
    """Argument outside the mathematical domain of the operation."""


class ParameterRangeError(ConfigError):
    """Dependence parameter or dimension incompatible with the family."""


class UnsupportedFamilyError(ConfigError):
    """Operation undefined for the requested copula family."""


class DimensionTooLargeError(ConfigError):
    pass


class ScaleMismatchError(ConfigError):
    pass


class NumericalError(OrthantVarError, ArithmeticError):
    """A well-posed request that could not be computed."""


class NoClosedFormError(NumericalError):
    pass


class NoSolutionError(NumericalError):
    pass


class BandStarvationError(NumericalError):
    """Too few Monte Carlo rows landed in the conditioning band."""
