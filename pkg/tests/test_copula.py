import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

import oracles

from orthantvar import margins as mg
from orthantvar.copula import (
    CopulaModel,
    SampleMatrix,
    copula_cdf,
    generator,
    generator_derivative,
    generator_inverse,
    generator_inverse_complement,
    generator_inverse_derivative,
    parse_copula,
    sample_copula,
    survival_value,
)
from orthantvar.errors import DomainError, ParameterRangeError, ScaleMismatchError, UnsupportedFamilyError

ARCHIMEDEAN_MODELS = [
    CopulaModel("clayton", 2, 2.0),
    CopulaModel("clayton", 2, -0.5),
    CopulaModel("gumbel", 2, 1.7),
    CopulaModel("frank", 2, -3.0),
    CopulaModel("frank", 3, 4.0),
    CopulaModel("amh", 2, 0.6),
    CopulaModel("amh", 2, -0.4),
    CopulaModel("independence", 3),
]


class TestGenerator:
    def test_clayton_value(self):
        assert generator(CopulaModel("clayton", 2, 2.0), 0.5) == pytest.approx(1.5)

    @pytest.mark.parametrize("model", ARCHIMEDEAN_MODELS, ids=lambda m: m.label())
    def test_vanishes_at_one(self, model):
        assert generator(model, 1.0) == pytest.approx(0.0, abs=1e-15)
        assert generator_inverse(model, 0.0) == pytest.approx(1.0)

    def test_gumbel_at_inverse_e(self):
        assert generator(CopulaModel("gumbel", 2, 2.0), math.exp(-1.0)) == pytest.approx(1.0)

    def test_clayton_inverse(self):
        assert generator_inverse(CopulaModel("clayton", 2, 2.0), 1.5) == pytest.approx(0.5)
        assert generator_inverse(CopulaModel("clayton", 2, 1.0), 1.0) == pytest.approx(0.5)

    def test_negative_clayton_reaches_zero(self):
        model = CopulaModel("clayton", 2, -0.5)
        assert generator_inverse(model, 2.0) == 0.0
        assert generator_inverse(model, 5.0) == 0.0

    @pytest.mark.parametrize("model", ARCHIMEDEAN_MODELS, ids=lambda m: m.label())
    def test_round_trip_and_complement(self, model):
        t = np.linspace(0.01, 0.99, 49)
        s = generator(model, t)
        np.testing.assert_allclose(generator_inverse(model, s), t, rtol=1e-12)
        np.testing.assert_allclose(generator_inverse_complement(model, s), 1.0 - t, rtol=1e-10)

    @pytest.mark.parametrize("model", ARCHIMEDEAN_MODELS, ids=lambda m: m.label())
    def test_complement_keeps_precision_near_zero(self, model):
        s = np.array([1e-14, 1e-12, 1e-10])
        fam = model.effective_family
        expected = [float(oracles.psi_complement(fam, model.theta, v)) for v in s]
        np.testing.assert_allclose(generator_inverse_complement(model, s), expected, rtol=1e-12)

    @pytest.mark.parametrize("model", ARCHIMEDEAN_MODELS, ids=lambda m: m.label())
    def test_derivative_matches_finite_difference(self, model):
        t = np.linspace(0.05, 0.95, 19)
        h = 1e-6
        numeric = (generator(model, t + h) - generator(model, t - h)) / (2 * h)
        np.testing.assert_allclose(generator_derivative(model, t), numeric, rtol=1e-6)

    @pytest.mark.parametrize("model", ARCHIMEDEAN_MODELS, ids=lambda m: m.label())
    @pytest.mark.parametrize("k", [1, 2])
    def test_inverse_derivatives(self, model, k):
        s = np.linspace(0.1, 3.0, 15)
        h = 1e-4
        lower = generator_inverse_derivative(model, s - h, k - 1) if k > 1 else generator_inverse(model, s - h)
        upper = generator_inverse_derivative(model, s + h, k - 1) if k > 1 else generator_inverse(model, s + h)
        numeric = (upper - lower) / (2 * h)
        np.testing.assert_allclose(generator_inverse_derivative(model, s, k), numeric, rtol=1e-5, atol=1e-9)

    def test_inverse_derivative_signs_alternate(self):
        model = CopulaModel("gumbel", 4, 2.5)
        s = np.linspace(0.1, 5.0, 30)
        for k in range(4):
            vals = generator_inverse_derivative(model, s, k)
            assert np.all((-1) ** k * vals >= 0.0)

    def test_degenerate_families_have_no_generator(self):
        with pytest.raises(UnsupportedFamilyError):
            generator(CopulaModel("comonotonic", 2), 0.5)


class TestCopulaCdf:
    def test_clayton(self):
        assert copula_cdf(CopulaModel("clayton", 2, 2.0), [0.5, 0.5]) == pytest.approx(7 ** -0.5)

    def test_independence(self):
        assert copula_cdf(CopulaModel("independence", 2), [0.3, 0.4]) == pytest.approx(0.12)

    def test_frechet_bounds(self):
        assert copula_cdf(CopulaModel("countermonotonic", 2), [0.3, 0.4]) == 0.0
        assert copula_cdf(CopulaModel("comonotonic", 3), [0.3, 0.4, 0.9]) == pytest.approx(0.3)

    def test_rows(self):
        u = np.array([[0.5, 0.5], [0.3, 0.4], [1.0, 0.7]])
        out = copula_cdf(CopulaModel("independence", 2), u)
        np.testing.assert_allclose(out, [0.25, 0.12, 0.7])

    @pytest.mark.parametrize("model", ARCHIMEDEAN_MODELS, ids=lambda m: m.label())
    def test_margins_are_uniform(self, model):
        u = np.full(model.d, 1.0)
        for v in (0.2, 0.7):
            u[0] = v
            assert copula_cdf(model, u) == pytest.approx(v, abs=1e-12)

    @pytest.mark.parametrize("model", ARCHIMEDEAN_MODELS, ids=lambda m: m.label())
    def test_within_frechet_bounds(self, model):
        rng = np.random.default_rng(3)
        u = rng.random((500, model.d))
        c = copula_cdf(model, u)
        assert np.all(c <= u.min(axis=1) + 1e-12)
        assert np.all(c >= np.maximum(u.sum(axis=1) - model.d + 1, 0.0) - 1e-12)

    def test_wrong_width(self):
        with pytest.raises(DomainError):
            copula_cdf(CopulaModel("independence", 3), [0.5, 0.5])


class TestSurvivalValue:
    def test_independence(self):
        model = CopulaModel("independence", 2)
        assert survival_value(model, [mg.uniform()] * 2, [0.5, 0.5]) == pytest.approx(0.25)

    def test_comonotonic(self):
        model = CopulaModel("comonotonic", 2)
        assert survival_value(model, [mg.uniform()] * 2, [0.3, 0.6]) == pytest.approx(0.4)

    def test_clayton_inclusion_exclusion(self):
        model = CopulaModel("clayton", 2, 2.0)
        assert survival_value(model, [mg.uniform()] * 2, [0.5, 0.5]) == pytest.approx(7 ** -0.5)

    def test_trivariate_inclusion_exclusion(self):
        model = CopulaModel("independence", 3)
        x = np.array([0.2, 0.5, 0.9])
        assert survival_value(model, [mg.uniform()] * 3, x) == pytest.approx(np.prod(1 - x))


class TestModel:
    def test_parse(self):
        assert parse_copula("clayton:2:3") == CopulaModel("clayton", 3, 2.0)
        assert parse_copula("comonotonic:2") == CopulaModel("comonotonic", 2)
        assert parse_copula("Ali-Mikhail-Haq:0.5:2").family == "amh"

    @pytest.mark.parametrize("spec", ["clayton", "clayton:x:2", "nosuch:1:2", "gumbel:2:2:2"])
    def test_parse_rejects(self, spec):
        with pytest.raises((ParameterRangeError, UnsupportedFamilyError)):
            parse_copula(spec)

    @pytest.mark.parametrize(
        "family,d,theta",
        [
            ("clayton", 2, -1.5),
            ("clayton", 3, -0.5),
            ("frank", 3, -1.0),
            ("gumbel", 2, 0.9),
            ("amh", 2, 1.0),
            ("amh", 3, 0.5),
            ("countermonotonic", 3, None),
            ("independence", 1, None),
            ("clayton", 2, None),
            ("independence", 2, 1.0),
            ("clayton", 2, float("nan")),
        ],
    )
    def test_parameter_ranges(self, family, d, theta):
        with pytest.raises(ParameterRangeError):
            CopulaModel(family, d, theta)

    def test_limits_resolve_to_independence(self):
        assert CopulaModel("clayton", 2, 0.0).effective_family == "independence"
        assert CopulaModel("frank", 2, 0.0).effective_family == "independence"
        assert CopulaModel("amh", 2, 0.0).effective_family == "independence"
        assert CopulaModel("clayton", 2, -1.0).effective_family == "countermonotonic"


class TestSampling:
    def test_comonotonic_rows_identical(self):
        s = sample_copula(CopulaModel("comonotonic", 3), 2, seed=11)
        assert s.values.shape == (2, 3)
        assert np.all(s.values == s.values[:, :1])

    def test_countermonotonic_rows_sum_to_one(self):
        s = sample_copula(CopulaModel("countermonotonic", 2), 1000, seed=1)
        np.testing.assert_allclose(s.values.sum(axis=1), 1.0, atol=1e-12)

    def test_clayton_empirical_cdf(self):
        s = sample_copula(CopulaModel("clayton", 2, 2.0), 100_000, seed=5)
        emp = np.mean(np.all(s.values <= 0.5, axis=1))
        assert abs(emp - 7 ** -0.5) < 0.005

    def test_independence_tau(self):
        s = sample_copula(CopulaModel("independence", 2), 100_000, seed=5)
        tau = stats.kendalltau(s.values[:, 0], s.values[:, 1]).statistic
        assert abs(tau) < 0.01

    @pytest.mark.parametrize("model", ARCHIMEDEAN_MODELS, ids=lambda m: m.label())
    def test_uniform_margins(self, model):
        s = sample_copula(model, 20_000, seed=2)
        for j in range(model.d):
            assert stats.kstest(s.values[:, j], "uniform").pvalue > 1e-4

    @pytest.mark.parametrize(
        "model,tau",
        [(CopulaModel("clayton", 2, 2.0), 0.5), (CopulaModel("gumbel", 2, 2.0), 0.5),
         (CopulaModel("clayton", 2, -0.5), -1 / 3)],
    )
    def test_sample_tau(self, model, tau):
        s = sample_copula(model, 20_000, seed=9)
        assert stats.kendalltau(s.values[:, 0], s.values[:, 1]).statistic == pytest.approx(tau, abs=0.02)

    def test_seed_and_worker_invariance(self):
        model = CopulaModel("frank", 3, 4.0)
        a = sample_copula(model, 50_000, seed=7, chunk_size=8192)
        b = sample_copula(model, 50_000, seed=7, chunk_size=8192, workers=3)
        c = sample_copula(model, 50_000, seed=8, chunk_size=8192)
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_strictly_inside_unit_cube(self):
        s = sample_copula(CopulaModel("gumbel", 2, 6.0), 50_000, seed=3)
        assert np.all((s.values > 0) & (s.values < 1))

    def test_bad_sample_size(self):
        with pytest.raises(DomainError):
            sample_copula(CopulaModel("independence", 2), 0, seed=1)

    def test_sample_matrix_validation(self):
        with pytest.raises(DomainError):
            SampleMatrix(np.array([[0.0, 0.5]]), 1)
        with pytest.raises(ScaleMismatchError):
            SampleMatrix(np.array([[0.2, 0.5]]), 1, scale="weird")
        assert SampleMatrix(np.array([[2.0, 0.5]]), 1, scale="portfolio").d == 2


@given(st.floats(0.05, 20.0), st.floats(0.001, 0.999), st.floats(0.001, 0.999))
def test_clayton_cdf_increasing(theta, u, v):
    model = CopulaModel("clayton", 2, theta)
    lo, hi = sorted((u, v))
    assert copula_cdf(model, [lo, 0.6]) <= copula_cdf(model, [hi, 0.6]) + 1e-14


@given(st.sampled_from(ARCHIMEDEAN_MODELS), st.floats(1e-6, 1 - 1e-6))
def test_generator_inverse_round_trip(model, t):
    assert generator_inverse(model, generator(model, t)) == pytest.approx(t, rel=1e-9)
