"""Multivariate orthant Value-at-Risk for Archimedean and degenerate copulas."""
from .copula import CopulaModel, SampleMatrix, parse_copula, sample_copula
from .errors import (
    BandStarvationError,
    ConfigError,
    NoClosedFormError,
    NumericalError,
    OrthantVarError,
)
from .kendall import kendall_cdf, kendall_inverse, kendall_stop_loss, kendall_tau
from .margins import Margin, parse_margin, parse_margins
from .riskmeasure import (
    Portfolio,
    VarVector,
    lower_var,
    lower_var_monte_carlo,
    lower_var_quadrature,
    marginal_var,
    upper_var,
    upper_var_monte_carlo,
    upper_var_quadrature,
    var_closed_form,
)

__version__ = "0.1.0"

__all__ = [
    "BandStarvationError", "ConfigError", "CopulaModel", "Margin", "NoClosedFormError",
    "NumericalError", "OrthantVarError", "Portfolio", "SampleMatrix", "VarVector",
    "kendall_cdf", "kendall_inverse", "kendall_stop_loss", "kendall_tau", "lower_var",
    "lower_var_monte_carlo", "lower_var_quadrature", "marginal_var", "parse_copula",
    "parse_margin", "parse_margins", "sample_copula", "upper_var", "upper_var_monte_carlo",
    "upper_var_quadrature", "var_closed_form",
]
