"""Copula families: generators, joint and survival CDFs, exact sampling.

Archimedean families are Clayton, Gumbel, Frank, Ali-Mikhail-Haq (``amh``)
and the independence copula (generator ``-ln t``). Comonotonic and
counter-monotonic structures are first-class but have no generator.

Sampling follows the simplex representation of an Archimedean vector:
``U_i = psi(S_i * R)`` with ``S`` uniform on the unit simplex and
``R = phi(W)``, where ``W`` is drawn from the Kendall distribution by
inverse-CDF.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _chunks, kernels
from .errors import (
    DimensionTooLargeError,
    DomainError,
    ParameterRangeError,
    ScaleMismatchError,
    UnsupportedFamilyError,
)

PARAMETRIC = ("clayton", "gumbel", "frank", "amh")
ARCHIMEDEAN = PARAMETRIC + ("independence",)
DEGENERATE = ("comonotonic", "countermonotonic")
FAMILIES = ARCHIMEDEAN + DEGENERATE

_ALIASES = {
    "ali-mikhail-haq": "amh",
    "alimikhailhaq": "amh",
    "ali_mikhail_haq": "amh",
    "indep": "independence",
    "pi": "independence",
    "product": "independence",
    "m": "comonotonic",
    "counter-monotonic": "countermonotonic",
    "counter_monotonic": "countermonotonic",
    "w": "countermonotonic",
}

# |theta| below this sends Clayton/Frank to the independence code path
DEGENERATE_THETA = 1e-8
MAX_SURVIVAL_DIM = 8

_CODES = {
    "independence": kernels.INDEPENDENCE,
    "clayton": kernels.CLAYTON,
    "gumbel": kernels.GUMBEL,
    "frank": kernels.FRANK,
    "amh": kernels.AMH,
}


def canonical_family(name: str) -> str:
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in FAMILIES:
        raise UnsupportedFamilyError(f"unknown copula family {name!r}; expected one of {FAMILIES}")
    return key


@dataclass(frozen=True)
class CopulaModel:
    """A copula family with its dependence parameter and dimension."""

    family: str
    d: int = 2
    theta: Optional[float] = None

    def __post_init__(self):
        fam = canonical_family(self.family)
        object.__setattr__(self, "family", fam)
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 2:
            raise ParameterRangeError(f"dimension must be an integer >= 2, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))
        if fam in PARAMETRIC:
            if self.theta is None:
                raise ParameterRangeError(f"{fam} copula needs a dependence parameter theta")
            theta = float(self.theta)
            if not math.isfinite(theta):
                raise ParameterRangeError(f"theta must be finite, got {self.theta!r}")
            object.__setattr__(self, "theta", theta)
            _check_theta(fam, theta, self.d)
        elif self.theta is not None:
            raise ParameterRangeError(f"{fam} copula takes no parameter")
        if fam == "countermonotonic" and self.d != 2:
            raise ParameterRangeError("the counter-monotonic copula exists only for d = 2")

    @property
    def is_archimedean(self) -> bool:
        return self.family in ARCHIMEDEAN

    @property
    def effective_family(self) -> str:
        """Family actually evaluated, after resolving limit parameters."""
        fam, theta = self.family, self.theta
        if fam in ("clayton", "frank") and abs(theta) < DEGENERATE_THETA:
            return "independence"
        if fam == "amh" and theta == 0.0:
            return "independence"
        if fam == "clayton" and theta == -1.0:
            # Frechet lower bound; generator 1 - t is still valid, but C(U) = 0 a.s.
            return "countermonotonic"
        return fam

    @property
    def code(self) -> int:
        if not self.is_archimedean:
            raise UnsupportedFamilyError(f"{self.family} copula has no Archimedean generator")
        eff = self.effective_family
        if eff == "independence":
            return kernels.INDEPENDENCE
        return _CODES[self.family]

    @property
    def kernel_theta(self) -> float:
        return 0.0 if self.code == kernels.INDEPENDENCE else float(self.theta)

    def with_theta(self, theta: float) -> "CopulaModel":
        return CopulaModel(self.family, self.d, theta)

    def label(self) -> str:
        if self.theta is None:
            return f"{self.family}:{self.d}"
        return f"{self.family}:{self.theta:g}:{self.d}"


def _check_theta(fam, theta, d):
    if fam == "clayton":
        if d == 2 and theta < -1.0:
            raise ParameterRangeError(f"bivariate Clayton needs theta >= -1, got {theta}")
        if d > 2 and theta <= -1.0 / (d - 1):
            raise ParameterRangeError(f"{d}-dimensional Clayton needs theta > {-1.0 / (d - 1):.6g}, got {theta}")
    elif fam == "frank":
        if d > 2 and theta <= 0.0 and abs(theta) >= DEGENERATE_THETA:
            raise ParameterRangeError(f"{d}-dimensional Frank needs theta > 0, got {theta}")
    elif fam == "gumbel":
        if theta < 1.0:
            raise ParameterRangeError(f"Gumbel needs theta >= 1, got {theta}")
    elif fam == "amh":
        if d != 2:
            raise ParameterRangeError("Ali-Mikhail-Haq is supported only for d = 2")
        if not -1.0 <= theta < 1.0:
            raise ParameterRangeError(f"Ali-Mikhail-Haq needs theta in [-1, 1), got {theta}")


def parse_copula(spec: str) -> CopulaModel:
    """Parse ``family:theta:dim`` (``family:dim`` for parameterless families)."""
    parts = [p.strip() for p in spec.split(":")]
    fam = canonical_family(parts[0])
    try:
        if fam in PARAMETRIC:
            if len(parts) not in (2, 3):
                raise ParameterRangeError(f"expected {fam}:THETA[:DIM], got {spec!r}")
            theta = float(parts[1])
            d = int(parts[2]) if len(parts) == 3 else 2
            return CopulaModel(fam, d, theta)
        if len(parts) > 2:
            raise ParameterRangeError(f"expected {fam}[:DIM], got {spec!r}")
        d = int(parts[1]) if len(parts) == 2 else 2
    except ValueError as exc:
        if isinstance(exc, ParameterRangeError):
            raise
        raise ParameterRangeError(f"malformed copula spec {spec!r}: {exc}") from None
    return CopulaModel(fam, d)


def _scalar_or_array(values, like):
    if np.ndim(like) == 0:
        return float(np.asarray(values).item())
    return values


def _require_archimedean(model):
    if not model.is_archimedean:
        raise UnsupportedFamilyError(f"{model.family} copula has no Archimedean generator")


# -- generator -------------------------------------------------------------

def generator(model: CopulaModel, t):
    """Archimedean generator ``phi(t)`` on ``(0, 1]``."""
    _require_archimedean(model)
    arr = np.asarray(t, dtype=np.float64)
    if np.any(~(arr > 0.0)) or np.any(arr > 1.0):
        raise DomainError("generator argument must lie in (0, 1]")
    return _scalar_or_array(kernels.generator(model.code, model.kernel_theta, arr), t)


def generator_inverse(model: CopulaModel, s):
    """Inverse generator ``psi(s) = phi^{-1}(s)`` for ``s >= 0``."""
    _require_archimedean(model)
    arr = np.asarray(s, dtype=np.float64)
    if np.any(~(arr >= 0.0)):
        raise DomainError("inverse-generator argument must be non-negative")
    return _scalar_or_array(kernels.generator_inverse(model.code, model.kernel_theta, arr), s)


def generator_inverse_complement(model: CopulaModel, s):
    """``1 - psi(s)`` evaluated without cancellation near ``s = 0``."""
    _require_archimedean(model)
    arr = np.asarray(s, dtype=np.float64)
    if np.any(~(arr >= 0.0)):
        raise DomainError("inverse-generator argument must be non-negative")
    code, theta = model.code, model.kernel_theta
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if code == kernels.INDEPENDENCE:
            out = -np.expm1(-arr)
        elif code == kernels.CLAYTON:
            base = np.maximum(theta * arr, -1.0)
            out = np.where(base > -1.0, -np.expm1(-np.log1p(base) / theta), 1.0)
        elif code == kernels.GUMBEL:
            out = -np.expm1(-arr ** (1.0 / theta))
        elif code == kernels.FRANK:
            out = np.log1p(math.expm1(theta) * -np.expm1(-arr)) / theta
        else:
            out = -np.expm1(-arr) / (1.0 - theta * np.exp(-arr))
    out = np.where(np.isinf(arr), 1.0, out)
    return _scalar_or_array(np.clip(out, 0.0, 1.0), s)


def generator_derivative(model: CopulaModel, t):
    """First derivative ``phi'(t)`` on ``(0, 1]``."""
    _require_archimedean(model)
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(~(t_arr > 0.0)) or np.any(t_arr > 1.0):
        raise DomainError("generator argument must lie in (0, 1]")
    code, theta = model.code, model.kernel_theta
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if code == kernels.INDEPENDENCE:
            out = -1.0 / t_arr
        elif code == kernels.CLAYTON:
            out = -np.exp(-(theta + 1.0) * np.log(t_arr))
        elif code == kernels.GUMBEL:
            out = -theta * np.maximum(-np.log(t_arr), 0.0) ** (theta - 1.0) / t_arr
        elif code == kernels.FRANK:
            out = -theta / np.expm1(theta * t_arr)
        else:
            out = (theta - 1.0) / (t_arr * (1.0 - theta * (1.0 - t_arr)))
    return _scalar_or_array(out, t)


def _gumbel_coefficients(a, k):
    """Coefficients ``c_j`` with ``psi^{(k)}(s) = exp(-x) sum_j c_j x^j / s^k``, ``x = s^a``."""
    c = np.array([1.0])
    for m in range(k):
        nxt = np.zeros(len(c) + 1)
        for j, cj in enumerate(c):
            nxt[j + 1] += -a * cj
            nxt[j] += (a * j - m) * cj
        c = nxt
    return c


def _rational_poly(b, order):
    """Polynomial ``P`` with ``D^order [y/(1+by)] = P(y)/(1+by)^(order+1)``, ``D = -y d/dy``."""
    P = np.polynomial.Polynomial([0.0, 1.0])
    one_by = np.polynomial.Polynomial([1.0, b])
    y = np.polynomial.Polynomial([0.0, 1.0])
    for m in range(order):
        P = -y * (P.deriv() * one_by - (m + 1) * b * P)
    return P


def generator_inverse_derivative(model: CopulaModel, s, k: int):
    """``k``-th derivative of the inverse generator, evaluated analytically."""
    _require_archimedean(model)
    if k < 0:
        raise DomainError("derivative order must be non-negative")
    s_arr = np.asarray(s, dtype=np.float64)
    if np.any(~(s_arr >= 0.0)):
        raise DomainError("inverse-generator argument must be non-negative")
    if k == 0:
        return generator_inverse(model, s)
    code, theta = model.code, model.kernel_theta
    with np.errstate(over="ignore", divide="ignore", invalid="ignore", under="ignore"):
        if code == kernels.INDEPENDENCE:
            out = (-1.0) ** k * np.exp(-s_arr)
        elif code == kernels.CLAYTON:
            coef = (-1.0) ** k * math.prod(1.0 + j * theta for j in range(k))
            base = 1.0 + theta * s_arr
            safe = np.where(base > 0.0, base, 1.0)
            out = np.where(base > 0.0, coef * safe ** (-1.0 / theta - k), 0.0)
        elif code == kernels.GUMBEL:
            a = 1.0 / theta
            x = s_arr ** a
            poly = np.polynomial.Polynomial(_gumbel_coefficients(a, k))
            out = np.exp(-x) * poly(x) / s_arr ** k
        elif code == kernels.FRANK:
            c = math.expm1(-theta)
            y = np.exp(-s_arr)
            out = (c / theta) * _rational_poly(c, k - 1)(y) / (1.0 + c * y) ** k
        else:
            y = np.exp(-s_arr)
            out = (1.0 - theta) * _rational_poly(-theta, k)(y) / (1.0 - theta * y) ** (k + 1)
    return _scalar_or_array(out, s)


# -- joint and survival CDF ----------------------------------------------

def copula_cdf(model: CopulaModel, u):
    """Evaluate ``C(u)`` for one point (shape ``(d,)``) or many (``(n, d)``)."""
    arr = np.asarray(u, dtype=np.float64)
    single = arr.ndim == 1
    rows = np.atleast_2d(arr)
    if rows.shape[1] != model.d:
        raise DomainError(f"expected points of dimension {model.d}, got {rows.shape[1]}")
    if np.any(~((rows >= 0.0) & (rows <= 1.0))):
        raise DomainError("copula arguments must lie in [0, 1]")
    fam = model.effective_family if model.family in DEGENERATE else model.family
    if fam == "comonotonic":
        out = rows.min(axis=1)
    elif fam == "countermonotonic":
        out = np.maximum(rows.sum(axis=1) - model.d + 1.0, 0.0)
    else:
        out = kernels.archimedean_cdf(model.code, model.kernel_theta, rows)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if single else out


def survival_value(model: CopulaModel, margins: Sequence, x):
    """Joint survival probability ``P(X_1 > x_1, ..., X_d > x_d)``.

    ``model`` is the copula of ``X``; the value is assembled by
    inclusion-exclusion over the ``2^d`` faces of the unit cube.
    """
    d = model.d
    if d > MAX_SURVIVAL_DIM:
        raise DimensionTooLargeError(
            f"inclusion-exclusion survival evaluation is capped at d = {MAX_SURVIVAL_DIM}")
    if len(margins) != d:
        raise DomainError(f"need {d} margins, got {len(margins)}")
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    rows = np.atleast_2d(arr)
    u = np.column_stack([m.cdf(rows[:, j]) for j, m in enumerate(margins)])
    total = np.ones(rows.shape[0])
    for size in range(1, d + 1):
        sign = -1.0 if size % 2 else 1.0
        for subset in itertools.combinations(range(d), size):
            face = np.ones_like(u)
            face[:, subset] = u[:, subset]
            if size == 1:
                term = u[:, subset[0]]
            else:
                term = copula_cdf(model, face)
            total += sign * term
    total = np.clip(total, 0.0, 1.0)
    return float(total[0]) if single else total


# -- sampling --------------------------------------------------------------

@dataclass(frozen=True)
class SampleMatrix:
    values: np.ndarray
    seed: int
    scale: str = "copula"

    def __post_init__(self):
        if self.scale not in ("copula", "portfolio"):
            raise ScaleMismatchError(f"scale must be 'copula' or 'portfolio', got {self.scale!r}")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[0] < 1:
            raise DomainError("sample matrix must be two-dimensional with at least one row")
        if self.scale == "copula" and np.any(~((vals > 0.0) & (vals < 1.0))):
            raise DomainError("copula-scale samples must lie strictly inside (0, 1)")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def _uniforms(rng, shape):
    return np.clip(rng.random(shape), kernels.TINY, kernels.ONE_MINUS)


def draw_chunk(model: CopulaModel, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` rows from ``model`` using ``rng``."""
    eff = model.effective_family
    d = model.d
    if eff == "comonotonic":
        return np.repeat(_uniforms(rng, (size, 1)), d, axis=1)
    if eff == "countermonotonic":
        v = _uniforms(rng, size)
        return np.clip(np.column_stack([v, 1.0 - v]), kernels.TINY, kernels.ONE_MINUS)
    if eff == "independence":
        return _uniforms(rng, (size, d))
    from .kendall import kendall_inverse_array

    w = kendall_inverse_array(model, _uniforms(rng, size))
    radial = kernels.generator(model.code, model.kernel_theta, w)
    expo = rng.standard_exponential((size, d))
    return kernels.radial_transform(model.code, model.kernel_theta, expo, radial)


def sample_copula(model: CopulaModel, n: int, seed: int, *, chunk_size: int = _chunks.DEFAULT_CHUNK,
                  workers: int = 1) -> SampleMatrix:
    """Draw ``n`` i.i.d. rows from ``model``; results are independent of ``workers``."""
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    parts = _chunks.map_chunks(lambda rng, m: draw_chunk(model, rng, m), int(n), seed,
                               chunk_size=chunk_size, workers=workers)
    return SampleMatrix(np.vstack(parts), _chunks.normalize_seed(seed), "copula")
