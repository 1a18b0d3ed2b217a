"""Tests for replicez.directional: the min and doubled rules, sign, adaptive r."""

import math

import numpy as np
import pytest

from replicez.definitions import Combiner, DomainError, Rule, Sign
from replicez.directional import (
    ReplicabilityQuery, adaptive_r, directional_test, directional_test_batch,
    final_pvalue, first_adaptive_r, min_rule_is_valid, resolve_rule,
)
from replicez.numerics import rng_stream
from replicez.partial_conjunction import StudyVector


class TestQuery:

    def test_defaults(self):
        q = ReplicabilityQuery(5, 3)
        assert q.alpha == 0.05
        assert q.combiner is Combiner.BONFERRONI
        assert q.rule is Rule.AUTO

    def test_names_coerced(self):
        q = ReplicabilityQuery(5, 3, 0.1, 'Sidak', 'double')
        assert q.combiner is Combiner.SIDAK
        assert q.rule is Rule.DOUBLE
        assert q.level == pytest.approx(0.05)

    @pytest.mark.parametrize('n, r, alpha', [(1, 1, 0.05), (5, 1, 0.05), (5, 6, 0.05), (5, 3, 0.5), (5, 3, 0.0)])
    def test_invalid(self, n, r, alpha):
        with pytest.raises(DomainError):
            ReplicabilityQuery(n, r, alpha)

    def test_unknown_rule(self):
        with pytest.raises(DomainError):
            ReplicabilityQuery(5, 3, rule='half')


class TestRules:

    @pytest.mark.parametrize('n, r, combiner, valid', [
        (20, 11, Combiner.BONFERRONI, True),
        (20, 11, Combiner.SIDAK, True),
        (20, 10, Combiner.BONFERRONI, False),
        (20, 11, Combiner.SIMES, False),
        (20, 11, Combiner.FISHER, False),
        (3, 2, Combiner.BONFERRONI, True),
        (3, 2, Combiner.SIDAK, False),
        (2, 2, Combiner.BONFERRONI, True),
    ])
    def test_min_rule_validity(self, n, r, combiner, valid):
        assert min_rule_is_valid(n, r, combiner) is valid

    def test_auto_resolution(self):
        assert resolve_rule(ReplicabilityQuery(20, 11)) is Rule.MIN
        assert resolve_rule(ReplicabilityQuery(20, 5)) is Rule.DOUBLE
        assert resolve_rule(ReplicabilityQuery(20, 5, rule='min')) is Rule.MIN

    def test_final_pvalue(self):
        assert final_pvalue(0.03, 0.4, Rule.MIN) == pytest.approx(0.03)
        assert final_pvalue(0.03, 0.4, Rule.DOUBLE) == pytest.approx(0.06)
        assert final_pvalue(0.7, 0.9, Rule.DOUBLE) == 1.0


class TestDirectionalTest:

    def test_strong_positive(self):
        res = directional_test(StudyVector([3.0, 3.0, 3.0]), ReplicabilityQuery(3, 2))
        assert res.rule_applied is Rule.MIN
        assert res.p_final == pytest.approx(0.0026998, abs=1e-7)
        assert res.reject
        assert res.sign is Sign.POSITIVE
        assert not res.unproven

    def test_strong_negative(self):
        res = directional_test(StudyVector([-3.0, -3.0, -3.0]), ReplicabilityQuery(3, 2))
        assert res.p_minus == pytest.approx(0.0026998, abs=1e-7)
        assert res.sign is Sign.NEGATIVE

    def test_not_rejected_has_no_sign(self):
        res = directional_test(StudyVector([0.1, -0.2, 0.3]), ReplicabilityQuery(3, 2))
        assert not res.reject
        assert res.sign is Sign.NONE

    def test_doubled_rule(self):
        s = StudyVector([2.2, 2.4, 0.1, 2.0, 1.9])
        q = ReplicabilityQuery(5, 2)
        res = directional_test(s, q)
        assert res.rule_applied is Rule.DOUBLE
        assert res.p_final == pytest.approx(min(1.0, 2 * min(res.p_plus, res.p_minus)))

    def test_unproven_min_rule_flagged(self, caplog):
        s = StudyVector(np.linspace(-1, 1, 20))
        res = directional_test(s, ReplicabilityQuery(20, 5, rule=Rule.MIN))
        assert res.unproven
        assert res.as_dict()['warning'] == 'unproven_validity'
        assert 'validity is not established' in caplog.text

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            directional_test(StudyVector([1.0, 2.0]), ReplicabilityQuery(3, 2))

    def test_as_dict(self):
        d = directional_test(StudyVector([3.0, 3.0, 3.0]), ReplicabilityQuery(3, 2)).as_dict()
        assert d['rule_applied'] == 'min'
        assert d['sign'] == 'positive'
        assert d['combiner'] == 'bonferroni'
        assert d['warning'] == ''

    @pytest.mark.parametrize('combiner', list(Combiner))
    def test_properties(self, combiner):
        rng = np.random.default_rng(42)
        for _ in range(2500):
            n = int(rng.integers(2, 9))
            r = int(rng.integers(2, n + 1))
            z = rng.normal(rng.normal(0, 2), 1.5, size=n)
            s = StudyVector(z)
            q_min = ReplicabilityQuery(n, r, 0.05, combiner, Rule.MIN)
            q_dbl = ReplicabilityQuery(n, r, 0.05, combiner, Rule.DOUBLE)

            res = directional_test(s, q_min)
            assert res.p_final <= directional_test(s, q_dbl).p_final

            neg = directional_test(-s, q_min)
            assert neg.p_final == res.p_final
            assert neg.sign.code == -res.sign.code or (res.p_plus == res.p_minus)

            perm = directional_test(StudyVector(rng.permutation(z)), q_min)
            assert perm.p_final == res.p_final

    @pytest.mark.parametrize('combiner', list(Combiner))
    def test_monotone_in_z(self, combiner):
        rng = np.random.default_rng(17)
        q = ReplicabilityQuery(6, 4, 0.05, combiner)
        for _ in range(2500):
            z = rng.normal(0, 2, size=6)
            i = int(rng.integers(0, 6))
            up = z.copy()
            up[i] += rng.uniform(0, 1)
            base = directional_test(StudyVector(z), q)
            moved = directional_test(StudyVector(up), q)
            assert moved.p_plus <= base.p_plus + 1e-15
            assert moved.p_minus >= base.p_minus - 1e-15


class TestBatch:

    @pytest.mark.parametrize('combiner', list(Combiner))
    def test_matches_single(self, combiner):
        rng = np.random.default_rng(1)
        z = rng.normal(0.5, 2, size=(200, 7))
        q = ReplicabilityQuery(7, 3, 0.1, combiner)
        batch = directional_test_batch(z, q)
        for i, row in enumerate(z):
            res = directional_test(StudyVector(row), q)
            assert batch.p_final[i] == pytest.approx(res.p_final, abs=1e-15)
            assert bool(batch.reject[i]) == res.reject
            assert Sign.from_code(batch.sign[i]) is res.sign

    def test_column_mismatch(self):
        with pytest.raises(DomainError):
            directional_test_batch(np.zeros((3, 4)), ReplicabilityQuery(5, 3))


class TestAdaptive:

    @pytest.mark.parametrize('n, k', [(2, 2), (3, 3), (4, 3), (5, 4), (20, 11), (21, 12)])
    def test_first_r(self, n, k):
        assert first_adaptive_r(n) == k
        assert 2 * k > n + 1

    def test_all_strong(self):
        res = adaptive_r(StudyVector([6.0] * 5), alpha=0.05)
        assert res.k == 4
        assert res.l == 5
        assert [st.r for st in res.per_step] == [4, 5]
        assert res.untested == []
        assert res.sign is Sign.POSITIVE

    def test_stops_at_first_acceptance(self):
        res = adaptive_r(StudyVector([6.0, 6.0, 6.0, 6.0, 0.0]), alpha=0.05)
        assert res.l == 4
        assert [st.reject for st in res.per_step] == [True, False]

    def test_noise(self):
        res = adaptive_r(StudyVector([0.3, -0.5, 0.1, 0.8, -1.0]), alpha=0.05)
        assert res.l == 0
        assert len(res.per_step) == 1
        assert res.untested == [5]
        assert res.sign is Sign.NONE
        assert res.as_dict()['untested'] == [5]

    def test_negative_direction(self):
        res = adaptive_r(StudyVector([-6.0] * 7), alpha=0.05, combiner='sidak')
        assert res.l == 7
        assert res.sign is Sign.NEGATIVE

    def test_bad_alpha(self):
        with pytest.raises(DomainError):
            adaptive_r(StudyVector([1.0, 2.0, 3.0]), alpha=0.7)

    @pytest.mark.slow
    @pytest.mark.parametrize('a', [0, 3, 6])
    def test_lower_bound_coverage(self, a):
        """l <= max(n+, n-) with probability at least 1 - alpha - 3 SE."""

        n, alpha, reps = 10, 0.1, 10_000
        theta = np.array([3.0] * a + [0.0] * (n - a))
        z = theta + rng_stream(77, a).standard_normal((reps, n))
        covered = sum(adaptive_r(StudyVector(row), alpha=alpha).l <= a for row in z)
        se = math.sqrt(alpha * (1 - alpha) / reps)
        assert covered / reps >= 1 - alpha - 3 * se
