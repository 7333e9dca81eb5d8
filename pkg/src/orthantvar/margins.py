"""Univariate non-negative loss distributions.

Each margin may carry an affine map ``x -> factor * X + offset`` with
``factor > 0`` and ``offset >= 0``; this keeps support in ``R_+`` and is what
the homogeneity and translation checks use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import special

from .errors import DomainError, ParameterRangeError

_ARITY = {"uniform": 0, "exponential": 1, "lognormal": 2, "pareto": 2}
_ALIASES = {"uniform01": "uniform", "exp": "exponential", "lognorm": "lognormal"}


def _out(values, like):
    return float(np.asarray(values).item()) if np.ndim(like) == 0 else values


def _open_unit(p, name):
    arr = np.asarray(p, dtype=np.float64)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError(f"{name} must lie in the open interval (0, 1)")
    return arr


@dataclass(frozen=True)
class Margin:
    """A margin: ``uniform``, ``exponential(rate)``, ``lognormal(mu, sigma)``
    or ``pareto(scale, shape)``, optionally scaled and shifted."""

    family: str
    params: Tuple[float, ...] = ()
    factor: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        fam = _ALIASES.get(self.family.lower(), self.family.lower())
        if fam not in _ARITY:
            raise ParameterRangeError(f"unknown margin family {self.family!r}")
        params = tuple(float(v) for v in self.params)
        if len(params) != _ARITY[fam]:
            raise ParameterRangeError(f"{fam} margin takes {_ARITY[fam]} parameters, got {len(params)}")
        if not all(math.isfinite(v) for v in params):
            raise ParameterRangeError("margin parameters must be finite")
        if fam == "exponential" and params[0] <= 0.0:
            raise ParameterRangeError("exponential rate must be positive")
        if fam == "lognormal" and params[1] <= 0.0:
            raise ParameterRangeError("lognormal sigma must be positive")
        if fam == "pareto":
            if params[0] <= 0.0:
                raise ParameterRangeError("Pareto scale must be positive")
            if params[1] <= 1.0:
                raise ParameterRangeError("Pareto shape must exceed 1 for a finite mean")
        if not (self.factor > 0.0 and math.isfinite(self.factor)):
            raise ParameterRangeError("scale factor must be positive")
        if not (self.offset >= 0.0 and math.isfinite(self.offset)):
            raise ParameterRangeError("shift must be non-negative")
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "factor", float(self.factor))
        object.__setattr__(self, "offset", float(self.offset))

    # -- transforms
    def scaled(self, c: float) -> "Margin":
        return Margin(self.family, self.params, self.factor * c, self.offset * c)

    def shifted(self, c: float) -> "Margin":
        return Margin(self.family, self.params, self.factor, self.offset + c)

    # -- base distribution on its own scale
    def _base_quantile(self, p):
        fam, par = self.family, self.params
        if fam == "uniform":
            return p
        if fam == "exponential":
            return -np.log1p(-p) / par[0]
        if fam == "lognormal":
            return np.exp(par[0] + par[1] * special.ndtri(p))
        return par[0] * np.exp(-np.log1p(-p) / par[1])

    def _base_survival_quantile(self, q):
        fam, par = self.family, self.params
        if fam == "uniform":
            return 1.0 - q
        if fam == "exponential":
            return -np.log(q) / par[0]
        if fam == "lognormal":
            return np.exp(par[0] - par[1] * special.ndtri(q))
        return par[0] * q ** (-1.0 / par[1])

    def _base_cdf(self, z):
        fam, par = self.family, self.params
        with np.errstate(divide="ignore", invalid="ignore"):
            if fam == "uniform":
                return np.clip(z, 0.0, 1.0)
            if fam == "exponential":
                return np.where(z > 0.0, -np.expm1(-par[0] * np.maximum(z, 0.0)), 0.0)
            if fam == "lognormal":
                zz = np.where(z > 0.0, z, 1.0)
                return np.where(z > 0.0, special.ndtr((np.log(zz) - par[0]) / par[1]), 0.0)
            zz = np.where(z > par[0], z, par[0])
            return np.where(z > par[0], -np.expm1(par[1] * np.log(par[0] / zz)), 0.0)

    def _base_sf(self, z):
        fam, par = self.family, self.params
        with np.errstate(divide="ignore", invalid="ignore"):
            if fam == "uniform":
                return np.clip(1.0 - z, 0.0, 1.0)
            if fam == "exponential":
                return np.where(z > 0.0, np.exp(-par[0] * np.maximum(z, 0.0)), 1.0)
            if fam == "lognormal":
                zz = np.where(z > 0.0, z, 1.0)
                return np.where(z > 0.0, special.ndtr(-(np.log(zz) - par[0]) / par[1]), 1.0)
            zz = np.where(z > par[0], z, par[0])
            return np.where(z > par[0], (par[0] / zz) ** par[1], 1.0)

    # -- public API
    def quantile(self, p):
        """Quantile function ``F^{-1}(p)``, ``p`` in ``(0, 1)``."""
        arr = _open_unit(p, "probability")
        return _out(self.offset + self.factor * self._base_quantile(arr), p)

    def survival_quantile(self, q):
        """Inverse survival function, ``quantile(1 - q)`` computed without cancellation."""
        arr = _open_unit(q, "survival probability")
        return _out(self.offset + self.factor * self._base_survival_quantile(arr), q)

    def cdf(self, x):
        arr = np.asarray(x, dtype=np.float64)
        return _out(self._base_cdf((arr - self.offset) / self.factor), x)

    def sf(self, x):
        arr = np.asarray(x, dtype=np.float64)
        return _out(self._base_sf((arr - self.offset) / self.factor), x)

    def mean(self) -> float:
        fam, par = self.family, self.params
        if fam == "uniform":
            base = 0.5
        elif fam == "exponential":
            base = 1.0 / par[0]
        elif fam == "lognormal":
            base = math.exp(par[0] + 0.5 * par[1] ** 2)
        else:
            base = par[0] * par[1] / (par[1] - 1.0)
        return self.offset + self.factor * base

    def spec(self) -> str:
        names = {"uniform": "uniform", "exponential": "exp", "lognormal": "lognorm", "pareto": "pareto"}
        out = ":".join([names[self.family]] + [f"{v:g}" for v in self.params])
        if self.factor != 1.0 or self.offset != 0.0:
            out += f"*{self.factor:g}+{self.offset:g}"
        return out


def uniform() -> Margin:
    return Margin("uniform")


def exponential(rate: float = 1.0) -> Margin:
    return Margin("exponential", (rate,))


def lognormal(mu: float = 0.0, sigma: float = 1.0) -> Margin:
    return Margin("lognormal", (mu, sigma))


def pareto(scale: float = 1.0, shape: float = 2.0) -> Margin:
    return Margin("pareto", (scale, shape))


def parse_margin(spec: str) -> Margin:
    """Parse ``uniform``, ``exp:RATE``, ``lognorm:MU:SIGMA`` or ``pareto:SCALE:SHAPE``."""
    parts = [p.strip() for p in spec.strip().split(":")]
    fam = _ALIASES.get(parts[0].lower(), parts[0].lower())
    try:
        params = tuple(float(v) for v in parts[1:])
    except ValueError:
        raise ParameterRangeError(f"malformed margin spec {spec!r}") from None
    return Margin(fam, params)


def parse_margins(spec: str, d: int | None = None):
    """Comma-separated margin specs; a single spec is repeated ``d`` times."""
    items = [parse_margin(s) for s in spec.split(",") if s.strip()]
    if not items:
        raise ParameterRangeError("no margins given")
    if d is not None:
        if len(items) == 1:
            items = items * d
        elif len(items) != d:
            raise ParameterRangeError(f"expected {d} margins, got {len(items)}")
    return items


def quantile(margin: Margin, p):
    return margin.quantile(p)


def survival_quantile(margin: Margin, q):
    return margin.survival_quantile(q)


def cdf(margin: Margin, x):
    return margin.cdf(x)
