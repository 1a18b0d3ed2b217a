"""Tests for replicez.numerics: normal functions, Poisson-binomial, random streams."""

import itertools
import math

import numpy as np
import pytest
from scipy import special

from replicez.definitions import DomainError
from replicez.numerics import (
    PoissonBinomial, norm_cdf, norm_pdf, norm_quantile, norm_sf, poisbin_pmf, poisbin_tail, rng_stream,
)


def _enumerate_pmf(probs):
    """P(S = k) by summing over all 2^m outcomes."""
    m = len(probs)
    pmf = np.zeros(m + 1)
    for outcome in itertools.product((0, 1), repeat=m):
        weight = 1.0
        for hit, p in zip(outcome, probs):
            weight *= p if hit else 1.0 - p
        pmf[sum(outcome)] += weight
    return pmf


class TestNormal:

    def test_cdf_values(self):
        assert norm_cdf(0.0) == 0.5
        assert norm_cdf(math.inf) == 1.0
        assert norm_cdf(-math.inf) == 0.0
        assert norm_cdf(1.6448536269514722) == pytest.approx(0.95, abs=1e-15)

    def test_cdf_vectorized_with_infinities(self):
        out = norm_cdf([-math.inf, 0.0, math.inf])
        np.testing.assert_array_equal(out, [0.0, 0.5, 1.0])

    def test_sf_is_reflected_cdf(self):
        x = np.linspace(-8, 8, 101)
        np.testing.assert_allclose(norm_sf(x), norm_cdf(-x), rtol=0, atol=0)
        assert norm_sf(math.inf) == 0.0

    def test_nan_rejected(self):
        with pytest.raises(DomainError):
            norm_cdf(float('nan'))

    def test_pdf(self):
        assert norm_pdf(0.0) == pytest.approx(0.3989422804014327, abs=1e-15)
        assert norm_pdf(1.0) == pytest.approx(0.24197072451914337, abs=1e-15)
        assert norm_pdf(2.5) == norm_pdf(-2.5)
        assert norm_pdf(math.inf) == 0.0

    def test_quantile_values(self):
        assert norm_quantile(0.5) == 0.0
        t = norm_quantile(1 - 0.1 / 19)
        assert t == pytest.approx(2.5580427269867, abs=1e-10)
        assert norm_cdf(t) == pytest.approx(1 - 0.1 / 19, abs=1e-12)
        assert norm_quantile(0.9) == pytest.approx(1.2815515655446004, abs=1e-12)

    def test_quantile_antisymmetric(self):
        u = np.linspace(0.001, 0.499, 200)
        np.testing.assert_array_equal(norm_quantile(1.0 - u), -norm_quantile(1.0 - (1.0 - u)))

    def test_quantile_round_trip(self):
        u = np.concatenate([np.logspace(-10, -1, 200), np.linspace(0.1, 0.9, 200), 1 - np.logspace(-10, -1, 200)])
        np.testing.assert_allclose(norm_cdf(norm_quantile(u)), u, rtol=0, atol=1e-12)

    @pytest.mark.parametrize('u', [0.0, 1.0, -0.1, 1.5])
    def test_quantile_domain(self, u):
        with pytest.raises(DomainError):
            norm_quantile(u)


class TestPoissonBinomial:

    def test_fair_coins(self):
        np.testing.assert_allclose(poisbin_pmf([0.5, 0.5]), [0.25, 0.5, 0.25], atol=1e-15)
        assert poisbin_tail([0.5, 0.5], 1) == pytest.approx(0.75, abs=1e-15)

    def test_empty(self):
        np.testing.assert_array_equal(poisbin_pmf([]), [1.0])
        assert poisbin_tail([], 0) == 1.0
        assert poisbin_tail([], 1) == 0.0

    def test_small_enumeration(self):
        probs = [0.1, 0.2, 0.3]
        expected = _enumerate_pmf(probs)
        np.testing.assert_allclose(poisbin_pmf(probs), expected, atol=1e-15)
        assert poisbin_tail(probs, 2) == pytest.approx(expected[2:].sum(), abs=1e-15)

    def test_matches_enumeration(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            m = int(rng.integers(0, 11))
            probs = rng.uniform(0, 1, size=m)
            np.testing.assert_allclose(poisbin_pmf(probs), _enumerate_pmf(probs), rtol=0, atol=1e-12)

    def test_equal_probs_binomial(self):
        for m, p in [(10, 0.3), (25, 0.05), (40, 0.5)]:
            k = np.arange(m + 1)
            binom = special.comb(m, k) * p ** k * (1 - p) ** (m - k)
            np.testing.assert_allclose(poisbin_pmf([p] * m), binom, rtol=0, atol=1e-12)

    def test_unimodal(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            pmf = poisbin_pmf(rng.uniform(0, 1, size=int(rng.integers(1, 30))))
            mode = int(np.argmax(pmf))
            assert np.all(np.diff(pmf[mode:]) <= 1e-15)
            assert np.all(np.diff(pmf[:mode + 1]) >= -1e-15)

    def test_sums_to_one(self):
        pmf = PoissonBinomial(np.linspace(0, 1, 57)).pmf()
        assert pmf.sum() == pytest.approx(1.0, abs=1e-12)

    def test_object_form(self):
        d = PoissonBinomial([0.2, 0.4, 0.6])
        assert d.m == 3
        assert d.mean == pytest.approx(1.2)
        assert poisbin_tail(d, 0) == 1.0
        assert poisbin_tail(d, 4) == 0.0
        assert d.sf(1) == pytest.approx(1 - 0.8 * 0.6 * 0.4)

    def test_bad_probs(self):
        with pytest.raises(DomainError):
            PoissonBinomial([0.2, 1.2])

    @pytest.mark.parametrize('k', [-1, 4, 1.5])
    def test_bad_tail_index(self, k):
        with pytest.raises(DomainError):
            poisbin_tail([0.1, 0.2], k)


class TestRngStream:

    def test_deterministic(self):
        a = rng_stream(123, 4).standard_normal(1000)
        b = rng_stream(123, 4).standard_normal(1000)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self):
        a = rng_stream(123, 0).standard_normal(100)
        b = rng_stream(123, 1).standard_normal(100)
        assert not np.array_equal(a, b)

    def test_moments(self):
        draws = rng_stream(2024).standard_normal(1_000_000)
        assert abs(draws.mean()) < 0.005
        assert abs(draws.var() - 1.0) < 0.01
