"""Tests for exponential-polynomial recovery and rate fits."""
import math

import numpy as np
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st
import pytest

from sphkit.errors import IllConditioned, OrderOverflow
from sphkit.expfit import ExpPolynomial, approximation_rate, expfit


class TestExpPolynomial:
    """Tests for ExpPolynomial."""

    def test_merge_equal_exponents(self):
        model = ExpPolynomial.from_terms([(-1.0, [1.0]), (-1.0, [2.0]), (0.5, [0.0])])
        assert model.order == 1
        assert model.terms[0].coefficients == (3.0 + 0j,)

    def test_evaluation(self):
        model = ExpPolynomial.from_terms([(-1.0, [1.0, 2.0])])
        t = np.array([0.0, 1.0])
        assert np.allclose(model(t), [1.0, 3.0 * math.exp(-1.0)])

    def test_shift_preserves_values(self):
        model = ExpPolynomial.from_terms([(-0.5 + 1j, [1.0, 0.5]), (0.2, [2.0])])
        moved = ExpPolynomial.from_terms([(-0.5 + 1j, [1.0, 0.5]), (0.2, [2.0])]).shifted(3.0)
        t = np.linspace(3.0, 5.0, 7)
        assert np.allclose(moved(t), model(t - 3.0))

    def test_empty(self):
        assert ExpPolynomial().is_zero
        assert np.all(ExpPolynomial()(np.arange(3.0)) == 0)


# Exponents on a quarter grid: Re in [-1, 1/4], Im in [-2, 2].
exponent_terms = st.lists(
    st.tuples(st.integers(-4, 1), st.integers(-8, 8), st.floats(0.5, 2.0), st.floats(0.0, 6.0)),
    min_size=1,
    max_size=6,
    unique_by=lambda term: (term[0], term[1]),
)


class TestExpfit:
    """Matrix-pencil recovery on clean samples."""

    def test_recovers_exponents(self):
        t = np.linspace(0.0, 10.0, 101)
        y = 2.0 * np.exp(-0.3 * t) + np.exp((-0.5 + 1j) * t)
        fit = expfit(t, y)
        assert fit.model.order == 2
        assert sorted(fit.model.exponents, key=lambda s: s.real) == pytest.approx([-0.5 + 1j, -0.3], abs=1e-6)
        assert np.allclose(fit.model(t), y, atol=1e-8)

    def test_single_complex_exponent(self):
        t = np.linspace(0.0, 10.0, 101)
        fit = expfit(t, np.exp((-0.5 + 1j) * t))
        (term,) = fit.model.terms
        assert term.exponent == pytest.approx(-0.5 + 1j, abs=1e-8)
        assert term.coefficients[0] == pytest.approx(1.0, abs=1e-8)

    def test_polynomial_factor(self):
        """(1+2t)e^{it} is one exponent with a degree-one polynomial."""
        t = np.linspace(0.0, 10.0, 101)
        fit = expfit(t, (1.0 + 2.0 * t) * np.exp(1j * t))
        (term,) = fit.model.terms
        assert term.exponent == pytest.approx(1j, abs=1e-6)
        assert term.degree == 1
        assert np.allclose(term.coefficients, [1.0, 2.0], atol=1e-5)

    def test_noisy_samples(self):
        rng = np.random.default_rng(3)
        t = np.linspace(0.0, 10.0, 101)
        y = 2.0 * np.exp(-0.3 * t) + np.exp((-0.5 + 1j) * t)
        noisy = y + 1e-7 * (rng.normal(size=t.size) + 1j * rng.normal(size=t.size))
        fit = expfit(t, noisy, svd_tol=1e-5)
        assert fit.model.order == 2
        assert sorted(fit.model.exponents, key=lambda s: s.real) == pytest.approx([-0.5 + 1j, -0.3], abs=1e-4)

    def test_order_overflow(self):
        t = np.linspace(0.0, 10.0, 101)
        y = np.exp(-0.3 * t) + np.exp(-1.0 * t) + np.exp(1j * t)
        with pytest.raises(OrderOverflow):
            expfit(t, y, model_order_max=2)

    @hyp_settings(max_examples=30, deadline=None)
    @given(exponent_terms)
    def test_synthesize_then_recover(self, terms):
        model = ExpPolynomial.from_terms(
            [(complex(re / 4.0, im / 4.0), [amplitude * np.exp(1j * phase)]) for re, im, amplitude, phase in terms]
        )
        t = np.linspace(0.0, 10.0, 101)

        fit = expfit(t, model(t))

        assert fit.model.order == model.order
        by_position = lambda s: (round(s.real, 6), round(s.imag, 6))
        assert np.allclose(sorted(fit.model.exponents, key=by_position), sorted(model.exponents, key=by_position), atol=1e-6)
        assert np.allclose(fit.model(t), model(t), rtol=1e-6, atol=1e-8)

    def test_offset_grid(self):
        """A grid not starting at zero gives the same model in the original variable."""
        t = np.linspace(4.0, 9.0, 61)
        y = np.exp(-0.8 * t)
        fit = expfit(t, y)
        (term,) = fit.model.terms
        assert term.exponent == pytest.approx(-0.8, abs=1e-8)
        assert term.coefficients[0] == pytest.approx(1.0, rel=1e-6)

    def test_zero_samples(self):
        fit = expfit(np.linspace(0.0, 1.0, 20), np.zeros(20))
        assert fit.model.is_zero

    def test_non_uniform_grid(self):
        with pytest.raises(IllConditioned):
            expfit([0.0, 1.0, 3.0, 4.0], [1.0, 1.0, 1.0, 1.0])


class TestApproximationRate:
    """Tests for approximation_rate."""

    def test_rate_of_remainder(self):
        t = np.linspace(0.0, 10.0, 101)
        f = np.exp(-t) + np.exp(-3.0 * t)
        model = ExpPolynomial.from_terms([(-1.0, [1.0])])
        rate = approximation_rate(t, f, model, rho=0.0, predicted=3.0)
        assert rate.epsilon == pytest.approx(3.0, rel=0.01)
        assert rate.matches_prediction

    def test_exact_model(self):
        t = np.linspace(0.0, 5.0, 51)
        model = ExpPolynomial.from_terms([(-1.0, [1.0])])
        rate = approximation_rate(t, np.exp(-t), model, rho=0.0, predicted=2.0)
        assert math.isinf(rate.epsilon)
        assert rate.method == "exact"
        assert rate.matches_prediction is None
