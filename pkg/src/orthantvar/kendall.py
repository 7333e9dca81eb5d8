"""Kendall distribution ``K(alpha) = P[C(U) <= alpha]`` and related functionals.

For a d-dimensional Archimedean copula

    K(alpha) = sum_{i=0}^{d-1} T_i,   T_i = (-s)^i / i! * psi^{(i)}(s),   s = phi(alpha),

and differentiating the sum telescopes to a single term,

    K'(alpha) = -d * phi'(alpha) * T_d / s.

Clayton, Gumbel and independence use closed forms for ``T_i`` that stay
finite at extreme ``alpha``; Frank and Ali-Mikhail-Haq go through the
analytic inverse-generator derivatives.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from . import kernels
from .copula import (
    CopulaModel,
    SampleMatrix,
    _gumbel_coefficients,
    copula_cdf,
    generator,
    generator_derivative,
    generator_inverse_derivative,
)
from .errors import DomainError, NoSolutionError, ScaleMismatchError, UnsupportedFamilyError

ALPHA_MIN = 1e-12
ALPHA_MAX = 1.0 - 1e-12
FD_STEP = 1e-6
QUAD_TOL = 1e-10
INVERSE_TOL = 1e-13


def _check_open_unit(x, name="alpha"):
    arr = np.asarray(x, dtype=np.float64)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError(f"{name} must lie in the open interval (0, 1)")
    return arr


def _out(values, like):
    return float(np.asarray(values).item()) if np.ndim(like) == 0 else values


def series_terms(model: CopulaModel, alpha, upto: int):
    """Terms ``T_0 .. T_upto`` of the Archimedean Kendall series (stacked on axis 0)."""
    a = np.clip(np.asarray(alpha, dtype=np.float64), ALPHA_MIN, ALPHA_MAX)
    code, theta = model.code, model.kernel_theta
    terms = []
    with np.errstate(over="ignore", invalid="ignore", divide="ignore", under="ignore"):
        if code == kernels.INDEPENDENCE:
            L = -np.log(a)
            for i in range(upto + 1):
                terms.append(a * L ** i / math.factorial(i))
        elif code == kernels.CLAYTON:
            r = -np.expm1(theta * np.log(a)) / theta
            for i in range(upto + 1):
                rising = math.prod(1.0 + j * theta for j in range(i))
                terms.append(a * rising / math.factorial(i) * r ** i)
        elif code == kernels.GUMBEL:
            L = -np.log(a)
            for i in range(upto + 1):
                poly = np.polynomial.Polynomial(_gumbel_coefficients(1.0 / theta, i))
                terms.append(a * (-1.0) ** i / math.factorial(i) * poly(L))
        else:
            s = kernels.generator(code, theta, a)
            for i in range(upto + 1):
                deriv = generator_inverse_derivative(model, s, i)
                terms.append((-s) ** i / math.factorial(i) * deriv)
    return np.stack([np.asarray(t, dtype=np.float64) for t in terms])


def kendall_cdf(model: CopulaModel, alpha, *, series: bool | None = None):
    """Kendall distribution function on ``(0, 1)``.

    Bivariate Archimedean models use ``alpha - phi(alpha)/phi'(alpha)`` unless
    ``series=True``; higher dimensions always use the series.
    """
    arr = _check_open_unit(alpha)
    eff = model.effective_family
    if eff == "comonotonic":
        return _out(arr.copy(), alpha)
    if eff == "countermonotonic" and not model.is_archimedean:
        return _out(np.ones_like(arr), alpha)
    a = np.clip(arr, ALPHA_MIN, ALPHA_MAX)
    if model.d == 2 and not series:
        if model.code == kernels.INDEPENDENCE:
            val = a * (1.0 - np.log(a))
        else:
            val = a - generator(model, a) / generator_derivative(model, a)
    else:
        val = series_terms(model, a, model.d - 1).sum(axis=0)
    return _out(np.clip(val, 0.0, 1.0), alpha)


def kendall_density(model: CopulaModel, alpha, *, method: str = "analytic"):
    """Density ``K'(alpha)``; ``method="fd"`` uses a central difference instead."""
    arr = _check_open_unit(alpha)
    if model.family in ("comonotonic", "countermonotonic"):
        raise UnsupportedFamilyError(f"Kendall distribution of the {model.family} copula has no density")
    if method == "fd":
        lo = np.clip(arr - FD_STEP, ALPHA_MIN, ALPHA_MAX)
        hi = np.clip(arr + FD_STEP, ALPHA_MIN, ALPHA_MAX)
        val = (kendall_cdf(model, hi) - kendall_cdf(model, lo)) / (hi - lo)
        return _out(np.maximum(val, 0.0), alpha)
    if method != "analytic":
        raise DomainError(f"unknown density method {method!r}")
    a = np.clip(arr, ALPHA_MIN, ALPHA_MAX)
    d = model.d
    top = series_terms(model, a, d)[d]
    s = generator(model, a)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = -d * generator_derivative(model, a) * top / s
    return _out(np.maximum(np.nan_to_num(val, nan=0.0), 0.0), alpha)


def kendall_inverse_array(model: CopulaModel, p):
    """Vectorised inverse of ``K`` for the sampler; out-of-range ``p`` is clamped."""
    p = np.asarray(p, dtype=np.float64)
    flat = p.ravel()
    lo = np.full(flat.shape, ALPHA_MIN)
    hi = np.clip(flat, ALPHA_MIN, ALPHA_MAX)  # K(a) >= a puts the root below p
    x = np.where(flat < 0.5, 0.5 * hi, hi)
    result = np.empty_like(flat)
    active = np.arange(flat.size)
    k_lo = kendall_cdf(model, np.array([ALPHA_MIN]))[0]
    below = flat <= k_lo
    result[below] = ALPHA_MIN
    active = active[~below]
    for _ in range(200):
        if active.size == 0:
            break
        xa = x[active]
        f = kendall_cdf(model, xa) - flat[active]
        done = np.abs(f) <= INVERSE_TOL
        pos = f > 0.0
        hi[active] = np.where(pos, xa, hi[active])
        lo[active] = np.where(pos, lo[active], xa)
        narrow = hi[active] - lo[active] <= 4e-16 * np.maximum(hi[active], 1e-300)
        finished = done | narrow
        result[active[finished]] = xa[finished]
        active = active[~finished]
        if active.size == 0:
            break
        xa = x[active]
        fa = f[~finished]
        slope = kendall_density(model, xa)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = xa - fa / slope
        la, ha = lo[active], hi[active]
        bisect = np.where(ha > 4.0 * la, np.sqrt(la * ha), 0.5 * (la + ha))
        ok = np.isfinite(step) & (step > la) & (step < ha)
        x[active] = np.where(ok, step, bisect)
    if active.size:
        result[active] = x[active]
    return result.reshape(p.shape)


def kendall_inverse(model: CopulaModel, p):
    """Solve ``K(alpha) = p``."""
    arr = _check_open_unit(p, "p")
    if model.effective_family == "countermonotonic":
        raise UnsupportedFamilyError(
            "the counter-monotonic Kendall distribution is degenerate (K = 1) and cannot be inverted")
    if model.family == "comonotonic":
        return _out(arr.copy(), p)
    floor = kendall_cdf(model, ALPHA_MIN)
    if np.any(arr < floor):
        raise NoSolutionError(f"p below the smallest attainable value K({ALPHA_MIN:g}) = {floor:.3g}")
    return _out(kendall_inverse_array(model, arr), p)


def kendall_empirical(sample: SampleMatrix, model: CopulaModel, alpha_grid):
    """Empirical CDF of ``C(row)`` over copula-scale rows, on ``alpha_grid``."""
    if sample.scale != "copula":
        raise ScaleMismatchError("empirical Kendall distribution needs a copula-scale sample")
    if sample.d != model.d:
        raise DomainError(f"sample has {sample.d} columns, model has dimension {model.d}")
    vals = np.sort(copula_cdf(model, sample.values))
    grid = np.asarray(alpha_grid, dtype=np.float64)
    return np.searchsorted(vals, grid, side="right") / vals.size


def _survival_integral(model, t):
    if model.family == "comonotonic":
        return 0.5 * (1.0 - t) ** 2
    if model.effective_family == "countermonotonic":
        return 0.0
    val, _ = integrate.quad(lambda a: 1.0 - kendall_cdf(model, a), t, 1.0,
                            epsabs=QUAD_TOL, epsrel=1e-12, limit=200)
    return val


def kendall_stop_loss(model: CopulaModel, t: float) -> float:
    """``E[(C(U) - t)_+] = int_t^1 (1 - K)``."""
    if not 0.0 <= t < 1.0:
        raise DomainError("stop-loss threshold must lie in [0, 1)")
    return max(_survival_integral(model, float(t)), 0.0)


def kendall_tau(model: CopulaModel) -> float:
    e_c = _survival_integral(model, 0.0)
    d = model.d
    return (2.0 ** d * e_c - 1.0) / (2.0 ** (d - 1) - 1.0)


def kendall_theta_slope(family: str, alpha: float, theta: float, dtheta: float, d: int = 2) -> float:
    """Central difference of ``K(alpha, theta)`` in ``theta``."""
    up = CopulaModel(family, d, theta + dtheta)
    down = CopulaModel(family, d, theta - dtheta)
    return (kendall_cdf(up, alpha) - kendall_cdf(down, alpha)) / (2.0 * dtheta)
