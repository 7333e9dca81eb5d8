import json

import pytest

from orthantvar.errors import ConfigError
from orthantvar.suite import CHECKS, DEFAULT_SEED, SuiteConfig, run_suite


@pytest.fixture(scope="module")
def default_report():
    return run_suite(SuiteConfig())


def test_default_config_passes(default_report):
    failing = [r.name for r in default_report.results if not r.passed]
    assert failing == []
    assert [r.name for r in default_report.results] == list(CHECKS)
    assert all(r.points > 0 for r in default_report.results)


def test_filter_runs_only_named_checks():
    report = run_suite(SuiteConfig(checks=("sandwich",)))
    assert [r.name for r in report.results] == ["sandwich"]
    assert report.passed


def test_inverted_theta_grid_fails():
    report = run_suite(SuiteConfig(checks=("dependence_monotonicity",), invert_theta=True))
    assert not report.passed
    assert report.failed == 1
    assert report.results[0].max_violation > report.results[0].tolerance


def test_deterministic_text_and_json():
    cfg = SuiteConfig(checks=("kendall_empirical", "sl_order_sampling", "monte_carlo_vs_quadrature"), mc_n=50_000)
    first, second = run_suite(cfg), run_suite(cfg)
    assert first.to_text() == second.to_text()
    assert first.to_json() == second.to_json()


def test_starved_monte_carlo_is_reported_not_raised():
    report = run_suite(SuiteConfig(checks=("monte_carlo_vs_quadrature",), mc_n=10_000))
    assert not report.passed
    assert json.loads(report.to_json())["checks"][0]["max_violation"] is None


def test_thread_pool_matches_serial():
    names = ("kendall_empirical", "reflection", "sandwich")
    serial = run_suite(SuiteConfig(checks=names, alpha_points=19))
    pooled = run_suite(SuiteConfig(checks=names, alpha_points=19, workers=3))
    assert serial.to_json() == pooled.to_json()


def test_report_rendering(default_report):
    text = default_report.to_text()
    lines = text.splitlines()
    assert len(lines) == len(CHECKS) + 1
    assert lines[0].startswith("PASS kendall_diagonal")
    assert lines[-1] == f"seed={DEFAULT_SEED} checks={len(CHECKS)} failed=0"
    payload = json.loads(default_report.to_json())
    assert payload["failed"] == 0
    assert {tuple(sorted(rec)) for rec in payload["checks"]} == {
        ("max_violation", "name", "points", "status", "tolerance")}


@pytest.mark.parametrize(
    "kwargs",
    [
        {"checks": ("nope",)},
        {"alpha_points": 2},
        {"alpha_points": True},
        {"mc_n": 100},
        {"workers": 0},
        {"thetas": {"joe": (1.0, 2.0)}},
        {"thetas": {"clayton": (1.0,)}},
    ],
)
def test_config_errors(kwargs):
    with pytest.raises(ConfigError):
        SuiteConfig(**kwargs)


def test_alpha_grid():
    grid = SuiteConfig(alpha_points=3).alphas()
    assert grid.tolist() == [0.25, 0.5, 0.75]
