"""Stochastic-order oracles.

``check_st_order`` compares quantile functions pointwise (usual stochastic
order). ``check_sl_order_kendall`` compares the stop-loss transforms of
``C(U)`` for two copula models, which is how the supermodular ordering of
``U`` shows up in the Kendall distribution. The consolidated property suite
lives in :mod:`orthantvar.suite`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .copula import CopulaModel, copula_cdf, sample_copula
from .errors import DomainError, UnsupportedFamilyError
from .kendall import kendall_stop_loss

ANALYTIC_TOL = 1e-9
ORDER_KINDS = ("st", "sl")


@dataclass(frozen=True)
class OrderReport:
    """Outcome of a pointwise order comparison ``lhs <= rhs`` on a grid."""

    kind: str
    grid: Tuple[float, ...]
    violations: List[Tuple[float, float, float]] = field(default_factory=list)
    tolerance: float = ANALYTIC_TOL

    def __post_init__(self):
        if self.kind not in ORDER_KINDS:
            raise DomainError(f"order kind must be one of {ORDER_KINDS}, got {self.kind!r}")

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def max_violation(self) -> float:
        return max((lhs - rhs for _, lhs, rhs in self.violations), default=0.0)

    def __bool__(self):
        return self.passed


def _grid(values, name):
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be a non-empty finite grid")
    return arr


def _compare(kind, grid, lhs, rhs, tol):
    bad = lhs > rhs + tol
    violations = [(float(g), float(a), float(b)) for g, a, b in zip(grid[bad], lhs[bad], rhs[bad])]
    return OrderReport(kind, tuple(float(g) for g in grid), violations, tol)


def check_st_order(quantile_a: Callable, quantile_b: Callable, grid: Sequence[float],
                   tol: float = ANALYTIC_TOL) -> OrderReport:
    """Test ``Q_a(p) <= Q_b(p)`` for every ``p`` in ``grid``."""
    g = _grid(grid, "probability grid")
    if np.any(~((g > 0.0) & (g < 1.0))):
        raise DomainError("probability grid must lie in (0, 1)")
    qa = np.asarray([quantile_a(p) for p in g], dtype=np.float64)
    qb = np.asarray([quantile_b(p) for p in g], dtype=np.float64)
    return _compare("st", g, qa, qb, tol)


def _require_kendall(model):
    if model.effective_family == "countermonotonic" or model.family == "comonotonic":
        raise UnsupportedFamilyError(
            f"the {model.family} copula has a degenerate Kendall distribution; no stop-loss comparison")


def check_sl_order_kendall(model_a: CopulaModel, model_b: CopulaModel, grid: Sequence[float],
                           tol: float = ANALYTIC_TOL) -> OrderReport:
    """Test ``E[(C_a(U) - t)_+] <= E[(C_b(U) - t)_+]`` for every ``t`` in ``grid``."""
    _require_kendall(model_a)
    _require_kendall(model_b)
    g = _grid(grid, "threshold grid")
    lhs = np.array([kendall_stop_loss(model_a, t) for t in g])
    rhs = np.array([kendall_stop_loss(model_b, t) for t in g])
    return _compare("sl", g, lhs, rhs, tol)


def sampled_stop_loss(model: CopulaModel, grid: Sequence[float], n: int, seed: int):
    """Monte Carlo ``E[(C(U) - t)_+]`` with standard errors, one entry per ``t``."""
    g = _grid(grid, "threshold grid")
    w = copula_cdf(model, sample_copula(model, n, seed).values)
    excess = np.maximum(w[:, None] - g[None, :], 0.0)
    mean = excess.mean(axis=0)
    se = excess.std(axis=0, ddof=1) / np.sqrt(n)
    return mean, se
