"""Property-verification suite.

Every named check evaluates one invariant on a deterministic grid and
reports the largest violation next to its tolerance. A check passes when
``max_violation <= tolerance``. Monte Carlo checks report violations in
units of their allowance so that the tolerance is 1.

>>> report = run_suite(SuiteConfig(checks=("kendall_diagonal",)))
>>> report.failed
0
"""
from __future__ import annotations

import json
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np

from .copula import CopulaModel, generator, generator_derivative, sample_copula
from .errors import ConfigError, NumericalError
from .kendall import (
    kendall_cdf,
    kendall_empirical,
    kendall_stop_loss,
    kendall_tau,
    kendall_theta_slope,
    series_terms,
)
from .margins import exponential, lognormal, pareto, uniform
from .orders import check_sl_order_kendall, check_st_order, sampled_stop_loss
from .riskmeasure import (
    Portfolio,
    closed_var,
    conditional_marginal_cdf,
    independence_var_integral,
    lower_var_monte_carlo,
    lower_var_quadrature,
    orthant_var,
    upper_var_monte_carlo,
    upper_var_quadrature,
    var_closed_form,
)

DEFAULT_SEED = 20240517

# increasing in dependence for every family
DEFAULT_THETAS: Dict[str, Tuple[float, ...]] = {
    "clayton": (-0.5, 0.5, 2.0, 10.0),
    "frank": (-3.0, 1.0, 3.0, 8.0),
    "gumbel": (1.0, 1.5, 2.0, 4.0),
    "amh": (-0.8, -0.3, 0.3, 0.8),
}
TRIVARIATE_THETAS: Dict[str, Tuple[float, ...]] = {
    "clayton": (-0.25, 1.0, 3.0),
    "frank": (1.0, 4.0),
    "gumbel": (1.2, 2.5),
}


@dataclass(frozen=True)
class SuiteConfig:
    """Selection and grid density for :func:`run_suite`.

    ``invert_theta`` reverses the theta grids of the dependence check only;
    it exists as a negative control and must make that check fail.
    """

    checks: Optional[Tuple[str, ...]] = None
    alpha_points: int = 99
    thetas: Mapping[str, Tuple[float, ...]] = field(default_factory=lambda: dict(DEFAULT_THETAS))
    invert_theta: bool = False
    seed: int = DEFAULT_SEED
    mc_n: int = 100_000
    workers: int = 1

    def __post_init__(self):
        if self.checks is not None:
            names = tuple(self.checks)
            unknown = [c for c in names if c not in CHECKS]
            if unknown:
                raise ConfigError(f"unknown check(s) {unknown}; known: {sorted(CHECKS)}")
            object.__setattr__(self, "checks", names)
        if isinstance(self.alpha_points, bool) or int(self.alpha_points) != self.alpha_points \
                or self.alpha_points < 3:
            raise ConfigError("alpha_points must be an integer >= 3")
        if int(self.mc_n) != self.mc_n or self.mc_n < 10_000:
            raise ConfigError("mc_n must be an integer >= 10000")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        thetas = {}
        for fam, grid in dict(self.thetas).items():
            if fam not in DEFAULT_THETAS:
                raise ConfigError(f"theta grid given for unsupported family {fam!r}")
            grid = tuple(float(t) for t in grid)
            if len(grid) < 2:
                raise ConfigError(f"theta grid for {fam} needs at least two values")
            thetas[fam] = grid
        object.__setattr__(self, "thetas", thetas)

    def alphas(self) -> np.ndarray:
        n = int(self.alpha_points)
        return np.arange(1, n + 1) / (n + 1)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_violation: float
    tolerance: float
    points: int

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass(frozen=True)
class SuiteReport:
    results: Tuple[CheckResult, ...]
    seed: int

    @property
    def failed(self) -> int:
        return sum(not r.passed for r in self.results)

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def to_text(self) -> str:
        width = max((len(r.name) for r in self.results), default=10)
        lines = [
            f"{r.status.upper():4} {r.name:<{width}}  max_violation={r.max_violation:.6e}"
            f"  tolerance={r.tolerance:.1e}  points={r.points}"
            for r in self.results
        ]
        lines.append(f"seed={self.seed} checks={len(self.results)} failed={self.failed}")
        return "\n".join(lines) + "\n"

    def to_records(self) -> List[dict]:
        # non-finite violations (a check that could not be evaluated) become null
        return [{"name": r.name, "status": r.status,
                 "max_violation": r.max_violation if math.isfinite(r.max_violation) else None,
                 "tolerance": r.tolerance, "points": r.points} for r in self.results]

    def to_json(self) -> str:
        payload = {"seed": self.seed, "failed": self.failed, "checks": self.to_records()}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


class _Tracker:
    """Collects the worst violation of ``value <= 0`` style comparisons."""

    def __init__(self):
        self.worst = -math.inf
        self.points = 0

    def add(self, violation):
        arr = np.asarray(violation, dtype=np.float64).ravel()
        if arr.size:
            bad = np.where(np.isnan(arr), math.inf, arr)
            self.worst = max(self.worst, float(bad.max()))
            self.points += arr.size

    def result(self, name, tol):
        worst = max(self.worst, 0.0) if self.points else math.inf
        return CheckResult(name, worst <= tol, worst, tol, self.points)


def _stream_seed(cfg: SuiteConfig, check: str, index: int) -> int:
    """Seed for draw ``index`` of ``check``; streams never overlap between checks."""
    key = [int(cfg.seed) % (1 << 64), zlib.crc32(check.encode()), index]
    return int(np.random.SeedSequence(key).generate_state(2, dtype=np.uint64)[0])


# -- model grids -------------------------------------------------------------

def _models(cfg: SuiteConfig, trivariate=True):
    out = [CopulaModel(fam, 2, th) for fam, grid in cfg.thetas.items() for th in grid]
    if trivariate:
        out += [CopulaModel(fam, 3, th) for fam, grid in TRIVARIATE_THETAS.items() for th in grid]
    return out


def _margin_sets():
    return (uniform(), exponential(1.0), lognormal(0.0, 0.5), pareto(1.0, 3.0))


def _portfolios(model, margin, d=None):
    d = model.d if d is None else d
    return Portfolio(model, (margin,) * d, False), Portfolio(model, (margin,) * d, True)


# -- Kendall checks ----------------------------------------------------------

def _kendall_diagonal(cfg):
    t = _Tracker()
    a = cfg.alphas()
    for model in _models(cfg) + [CopulaModel("independence", 2), CopulaModel("independence", 4)]:
        k = kendall_cdf(model, a)
        t.add(a - k)
        t.add(k - 1.0)
    return t.result("kendall_diagonal", 0.0)


def _kendall_series(cfg):
    t = _Tracker()
    a = cfg.alphas()
    for model in _models(cfg, trivariate=False):
        series = series_terms(model, a, 1).sum(axis=0)
        shortcut = a - generator(model, a) / generator_derivative(model, a)
        t.add(np.abs(series - shortcut))
    return t.result("kendall_series", 1e-12)


def _kendall_theta_slope(cfg):
    t = _Tracker()
    a = cfg.alphas()
    for fam, grid in cfg.thetas.items():
        lo, hi = min(grid), max(grid)
        for th in np.linspace(lo, hi, 9)[1:-1]:
            if fam == "clayton" and abs(th) < 1e-3:
                continue
            step = 1e-4 * max(1.0, abs(th))
            t.add(kendall_theta_slope(fam, a, th, step))
    return t.result("kendall_theta_slope", 1e-9)


def _consecutive(grid):
    g = sorted(grid)
    return list(zip(g[:-1], g[1:]))


def _kendall_stop_loss_order(cfg):
    t = _Tracker()
    ts = np.linspace(0.0, 0.95, 20)
    for fam, grid in cfg.thetas.items():
        for a, b in _consecutive(grid):
            rep = check_sl_order_kendall(CopulaModel(fam, 2, a), CopulaModel(fam, 2, b), ts)
            lhs = np.array([kendall_stop_loss(CopulaModel(fam, 2, a), x) for x in ts])
            rhs = np.array([kendall_stop_loss(CopulaModel(fam, 2, b), x) for x in ts])
            t.add(lhs - rhs)
            if not rep.passed:
                t.add(rep.max_violation)
    return t.result("kendall_stop_loss_order", 1e-9)


def _kendall_tau(cfg):
    t = _Tracker()
    t.add(abs(kendall_tau(CopulaModel("independence", 2))))
    t.add(abs(kendall_tau(CopulaModel("independence", 3))))
    t.add(abs(kendall_tau(CopulaModel("comonotonic", 2)) - 1.0))
    t.add(abs(kendall_tau(CopulaModel("comonotonic", 4)) - 1.0))
    for th in (0.5, 2.0, 10.0):
        t.add(abs(kendall_tau(CopulaModel("clayton", 2, th)) - th / (th + 2.0)))
    for th in (1.5, 2.0, 4.0):
        t.add(abs(kendall_tau(CopulaModel("gumbel", 2, th)) - (1.0 - 1.0 / th)))
    for fam, grid in cfg.thetas.items():
        taus = [kendall_tau(CopulaModel(fam, 2, th)) for th in sorted(grid)]
        t.add(-np.diff(taus))
    return t.result("kendall_tau", 1e-8)


def _kendall_empirical(cfg):
    t = _Tracker()
    grid = np.linspace(0.0, 1.0, 201)[1:-1]
    models = [CopulaModel("clayton", 2, 2.0), CopulaModel("gumbel", 2, 1.5), CopulaModel("frank", 2, 3.0),
              CopulaModel("amh", 2, 0.5), CopulaModel("clayton", 3, 1.0), CopulaModel("independence", 3)]
    for i, model in enumerate(models):
        sample = sample_copula(model, cfg.mc_n, _stream_seed(cfg, "kendall_empirical", i))
        t.add(np.abs(kendall_empirical(sample, model, grid) - kendall_cdf(model, grid)))
    return t.result("kendall_empirical", 0.01)


# -- orders ------------------------------------------------------------------

def _prd(cfg):
    t = _Tracker()
    u = np.linspace(0.02, 0.98, 49)
    a = cfg.alphas()
    for model in _models(cfg):
        vals = conditional_marginal_cdf(model, u[:, None], a[None, :])
        t.add(np.diff(vals, axis=1))
    return t.result("prd", 1e-12)


def _st_order(cfg):
    t = _Tracker()
    grid = cfg.alphas()
    margins = _margin_sets() + (exponential(0.5),)
    for m in margins:
        rep = check_st_order(m.quantile, m.quantile, grid)
        t.add(0.0 if rep.passed and not rep.violations else rep.max_violation + 1.0)
    for a in margins:
        for b in margins:
            ab = check_st_order(a.quantile, b.quantile, grid)
            ba = check_st_order(b.quantile, a.quantile, grid)
            if ab.passed and ba.passed:
                t.add(np.abs(a.quantile(grid) - b.quantile(grid)) - 1e-9)
    # rate 0.5 dominates rate 1, and the reverse must be reported
    t.add(0.0 if check_st_order(exponential(1.0).quantile, exponential(0.5).quantile, grid).passed else 1.0)
    t.add(1.0 if check_st_order(exponential(0.5).quantile, exponential(1.0).quantile, grid).passed else 0.0)
    return t.result("st_order", 1e-9)


def _sl_order_sampling(cfg):
    t = _Tracker()
    ts = np.linspace(0.0, 0.9, 10)
    for i, th in enumerate((1.0, 3.0)):
        model = CopulaModel("clayton", 2, th)
        mean, se = sampled_stop_loss(model, ts, cfg.mc_n, _stream_seed(cfg, "sl_order_sampling", i))
        exact = np.array([kendall_stop_loss(model, x) for x in ts])
        t.add(np.abs(mean - exact) / (3.0 * np.maximum(se, 1e-12)))
    good = check_sl_order_kendall(CopulaModel("clayton", 2, 1.0), CopulaModel("clayton", 2, 3.0), ts)
    bad = check_sl_order_kendall(CopulaModel("clayton", 2, 3.0), CopulaModel("clayton", 2, 1.0), ts)
    t.add(0.0 if good.passed and not bad.passed else 2.0)
    return t.result("sl_order_sampling", 1.0)


# -- risk measure checks -----------------------------------------------------

def _sandwich(cfg):
    t = _Tracker()
    a = np.linspace(0.05, 0.95, 19)
    for model in _models(cfg):
        for margin in _margin_sets():
            low_p, up_p = _portfolios(model, margin)
            q = margin.quantile(a)
            lo = np.array([lower_var_quadrature(low_p, x).components for x in a])
            up = np.array([upper_var_quadrature(up_p, x).components for x in a])
            t.add(q[:, None] - lo)
            t.add(up - q[:, None])
    return t.result("sandwich", 1e-8)


def _comonotonic(cfg):
    t = _Tracker()
    a = cfg.alphas()[::7]
    for d in (2, 3):
        for margin in (uniform(), exponential(1.0)):
            p = Portfolio(CopulaModel("comonotonic", d), (margin,) * d)
            for x in a:
                q = margin.quantile(x)
                for orthant in ("lower", "upper"):
                    for method in ("closed", "quadrature", "monte-carlo"):
                        v = orthant_var(p, x, orthant, method, n=cfg.mc_n, seed=_stream_seed(cfg, "comonotonic", 0))
                        t.add(np.abs(v.components - q))
    return t.result("comonotonic", 0.0)


def _exchangeable(cfg):
    t = _Tracker()
    for model in _models(cfg):
        for margin in (uniform(), exponential(1.0)):
            low_p, up_p = _portfolios(model, margin)
            for x in (0.1, 0.5, 0.9):
                for v in (lower_var_quadrature(low_p, x), upper_var_quadrature(up_p, x)):
                    t.add(v.components.max() - v.components.min())
    return t.result("exchangeable", 1e-12)


def _affine_models():
    return [CopulaModel("clayton", 2, th) for th in (-0.5, 2.0)] + \
           [CopulaModel("frank", 2, th) for th in (-3.0, 3.0)]


def _homogeneity(cfg):
    t = _Tracker()
    base = (uniform(), uniform())
    for model in _affine_models():
        for c in ((2.0, 0.5), (1.0, 3.0)):
            scaled = tuple(m.scaled(ci) for m, ci in zip(base, c))
            for flag, quad in ((False, lower_var_quadrature), (True, upper_var_quadrature)):
                for x in (0.1, 0.5, 0.9):
                    ref = quad(Portfolio(model, base, flag), x).components
                    got = quad(Portfolio(model, scaled, flag), x).components
                    t.add(np.abs(got - np.asarray(c) * ref))
    return t.result("homogeneity", 1e-8)


def _translation(cfg):
    t = _Tracker()
    base = (uniform(), uniform())
    for model in _affine_models():
        for c in ((0.1, 1.0),):
            shifted = tuple(m.shifted(ci) for m, ci in zip(base, c))
            for flag, quad in ((False, lower_var_quadrature), (True, upper_var_quadrature)):
                for x in (0.1, 0.5, 0.9):
                    ref = quad(Portfolio(model, base, flag), x).components
                    got = quad(Portfolio(model, shifted, flag), x).components
                    t.add(np.abs(got - (np.asarray(c) + ref)))
    return t.result("translation", 1e-8)


def _reflection(cfg):
    t = _Tracker()
    a = cfg.alphas()
    for model in _models(cfg, trivariate=False):
        base = (uniform(),) * model.d
        for x in a:
            upper = upper_var_quadrature(Portfolio(model, base, True), x).components
            lower = lower_var_quadrature(Portfolio(model, base, False), 1.0 - x).components
            t.add(np.abs(upper - (1.0 - lower)))
    return t.result("reflection", 1e-8)


def _risk_level_monotonicity(cfg):
    t = _Tracker()
    a = cfg.alphas()
    for model in _models(cfg):
        for margin in (uniform(), exponential(1.0)):
            low_p, up_p = _portfolios(model, margin)
            lo = np.array([lower_var_quadrature(low_p, x)[0] for x in a])
            up = np.array([upper_var_quadrature(up_p, x)[0] for x in a])
            t.add(-np.diff(lo))
            t.add(-np.diff(up))
    return t.result("risk_level_monotonicity", 1e-12)


def _dependence_monotonicity(cfg):
    t = _Tracker()
    a = cfg.alphas()[::4]
    grids = {f: tuple(sorted(g)) for f, g in cfg.thetas.items()}
    if cfg.invert_theta:
        grids = {f: g[::-1] for f, g in grids.items()}
    for fam, grid in grids.items():
        for margin in (uniform(), exponential(1.0)):
            lo, up = [], []
            for th in grid:
                low_p, up_p = _portfolios(CopulaModel(fam, 2, th), margin)
                lo.append([lower_var_quadrature(low_p, x)[0] for x in a])
                up.append([upper_var_quadrature(up_p, x)[0] for x in a])
            t.add(np.diff(lo, axis=0))
            t.add(-np.diff(up, axis=0))
    return t.result("dependence_monotonicity", 1e-12)


def _marginal_shift(cfg):
    t = _Tracker()
    small = (exponential(1.0), exponential(1.0))
    large = (exponential(0.5), exponential(1.0))
    for model in _models(cfg, trivariate=False):
        for flag, quad in ((False, lower_var_quadrature), (True, upper_var_quadrature)):
            for x in (0.1, 0.5, 0.9):
                a = quad(Portfolio(model, small, flag), x).components
                b = quad(Portfolio(model, large, flag), x).components
                t.add(a[0] - b[0])
                t.add(abs(a[1] - b[1]))
    return t.result("marginal_shift", 1e-8)


def _closed_vs_quadrature(cfg):
    t = _Tracker()
    a = np.array([0.1, 0.25, 0.5, 0.75, 0.9])
    cases = [CopulaModel("clayton", 2, th) for th in (-0.5, 0.5, 1.0, 2.0, 10.0)]
    cases += [CopulaModel("clayton", 3, th) for th in (-0.25, 0.5, 1.0, 3.0)]
    cases += [CopulaModel("amh", 2, th) for th in (-0.8, 0.3, 0.8)]
    cases += [CopulaModel("independence", 2), CopulaModel("independence", 3),
              CopulaModel("countermonotonic", 2)]
    for model in cases:
        for x in a:
            for flag, orthant in ((False, "lower"), (True, "upper")):
                p = Portfolio(model, (), flag)
                closed = closed_var(p, x, orthant).components
                quad = orthant_var(p, x, orthant, "quadrature").components
                t.add(np.abs(closed - quad))
    for x in a:
        t.add(abs(var_closed_form("pi_sigma_pi", None, x, 2) - x * math.log(x) / (x - 1.0)))
        t.add(abs(var_closed_form("comonotonic", None, x, 2) - x))
        t.add(abs(var_closed_form("countermonotonic", None, x, 2) - 0.5 * (1.0 + x)))
    return t.result("closed_vs_quadrature", 1e-8)


def _monte_carlo_vs_quadrature(cfg):
    t = _Tracker()
    cases = [
        (CopulaModel("clayton", 2, 2.0), uniform(), 0.5),
        (CopulaModel("gumbel", 2, 2.0), exponential(1.0), 0.3),
        (CopulaModel("frank", 2, 3.0), uniform(), 0.7),
        (CopulaModel("amh", 2, 0.5), exponential(1.0), 0.5),
        (CopulaModel("clayton", 3, 1.0), uniform(), 0.5),
        (CopulaModel("independence", 3), uniform(), 0.5),
    ]
    for i, (model, margin, x) in enumerate(cases):
        low_p, up_p = _portfolios(model, margin)
        for flag, (p, mc, quad) in enumerate(((low_p, lower_var_monte_carlo, lower_var_quadrature),
                                              (up_p, upper_var_monte_carlo, upper_var_quadrature))):
            seed = _stream_seed(cfg, "monte_carlo_vs_quadrature", 2 * i + flag)
            try:
                est = mc(p, x, cfg.mc_n, seed=seed, workers=cfg.workers)
            except NumericalError:
                # a starved band at this sample size counts against the check
                t.add(math.inf)
                continue
            exact = quad(p, x).components
            allowance = np.maximum(0.01, 3.0 * est.stderr)
            t.add(np.abs(est.components - exact) / allowance)
    return t.result("monte_carlo_vs_quadrature", 1.0)


def _independence_integral(cfg):
    t = _Tracker()
    model = CopulaModel("independence", 2)
    for margin in _margin_sets():
        for x in (0.05, 0.25, 0.5, 0.75, 0.95):
            for flag, orthant, quad in ((False, "lower", lower_var_quadrature),
                                        (True, "upper", upper_var_quadrature)):
                v = quad(Portfolio(model, (margin, margin), flag), x)[0]
                t.add(abs(v - independence_var_integral(margin, x, orthant)))
    return t.result("independence_integral", 1e-6)


CHECKS: Dict[str, Callable[[SuiteConfig], CheckResult]] = {
    "kendall_diagonal": _kendall_diagonal,
    "kendall_series": _kendall_series,
    "kendall_theta_slope": _kendall_theta_slope,
    "kendall_stop_loss_order": _kendall_stop_loss_order,
    "kendall_tau": _kendall_tau,
    "kendall_empirical": _kendall_empirical,
    "prd": _prd,
    "st_order": _st_order,
    "sl_order_sampling": _sl_order_sampling,
    "sandwich": _sandwich,
    "comonotonic": _comonotonic,
    "exchangeable": _exchangeable,
    "homogeneity": _homogeneity,
    "translation": _translation,
    "reflection": _reflection,
    "risk_level_monotonicity": _risk_level_monotonicity,
    "dependence_monotonicity": _dependence_monotonicity,
    "marginal_shift": _marginal_shift,
    "closed_vs_quadrature": _closed_vs_quadrature,
    "monte_carlo_vs_quadrature": _monte_carlo_vs_quadrature,
    "independence_integral": _independence_integral,
}


def run_suite(config: Optional[SuiteConfig] = None) -> SuiteReport:
    """Run the selected checks; the report lists them in registry order."""
    cfg = config if config is not None else SuiteConfig()
    names = [n for n in CHECKS if cfg.checks is None or n in cfg.checks]
    if cfg.workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(lambda n: CHECKS[n](cfg), names))
    else:
        results = [CHECKS[n](cfg) for n in names]
    return SuiteReport(tuple(results), int(cfg.seed))
