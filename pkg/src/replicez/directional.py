#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
replicez.directional
~~~~~~~~~~~~~

The directional replicability test of H_{r/n}: n+ < r and n- < r.

The two one-sided partial conjunction p-values are merged either by the
min rule, min(p+, p-), or by the classical doubled rule,
min(1, 2 * min(p+, p-)). The min rule is valid without the factor of two
when 2r > n + 1 (Bonferroni or Sidak) and in the n = 3, r = 2 Bonferroni
case. After a rejection the sign is declared positive when p+ < p-, and
negative otherwise.

:copyright: (c) 2010-2026 Regents of the University of Colorado
:license: MIT, see LICENSE for more details.
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Tuple

import numpy as np

from .definitions import Combiner, Rule, Sign, DomainError
from .partial_conjunction import check_r, pc_pair, pc_pvalues

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReplicabilityQuery:
    """One test of H_{r/n} at level alpha."""

    n: int
    r: int
    alpha: float = 0.05
    combiner: Combiner = Combiner.BONFERRONI
    rule: Rule = Rule.AUTO

    def __post_init__(self):
        object.__setattr__(self, 'combiner', Combiner.from_name(self.combiner))
        object.__setattr__(self, 'rule', Rule.from_name(self.rule))

        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f'n must be an integer >= 2, got {self.n}')
        check_r(self.r, self.n, min_r=2)
        check_alpha(self.alpha)

    def with_r(self, r):
        return replace(self, r=r)

    @property
    def applied_rule(self):
        return resolve_rule(self)

    @property
    def level(self):
        """Per-direction level: alpha under the min rule, alpha / 2 when doubled."""

        return self.alpha if self.applied_rule is Rule.MIN else self.alpha / 2.0


def check_alpha(alpha):
    if not 0.0 < alpha < 0.5:
        raise DomainError(f'alpha must lie in (0, 0.5), got {alpha}')


def min_rule_is_valid(n, r, combiner=Combiner.BONFERRONI):
    """Whether min(p+, p-) is a proven valid p-value for H_{r/n}."""

    combiner = Combiner.from_name(combiner)
    check_r(r, n, min_r=2)

    if 2 * r > n + 1 and combiner in (Combiner.BONFERRONI, Combiner.SIDAK):
        return True
    return n == 3 and r == 2 and combiner is Combiner.BONFERRONI


def resolve_rule(q):
    """The rule actually applied for a query: MIN or DOUBLE."""

    if q.rule is Rule.AUTO:
        return Rule.MIN if min_rule_is_valid(q.n, q.r, q.combiner) else Rule.DOUBLE
    return q.rule


def final_pvalue(p_plus, p_minus, rule):
    """Merge the one-sided p-values under an applied rule (vectorized)."""

    smaller = np.minimum(p_plus, p_minus)
    if rule is Rule.MIN:
        return smaller
    return np.minimum(1.0, 2.0 * smaller)


@dataclass(frozen=True)
class DirectionalResult:
    p_plus: float
    p_minus: float
    p_final: float
    rule_applied: Rule
    reject: bool
    sign: Sign
    # min rule requested where its validity is not established
    unproven: bool = False
    n: int = 0
    r: int = 0
    combiner: Combiner = Combiner.BONFERRONI

    def as_dict(self):
        return {
            'n': self.n,
            'r': self.r,
            'combiner': str(self.combiner),
            'p_plus': self.p_plus,
            'p_minus': self.p_minus,
            'p_final': self.p_final,
            'rule_applied': str(self.rule_applied),
            'reject': self.reject,
            'sign': str(self.sign),
            'warning': 'unproven_validity' if self.unproven else '',
        }


def _declare_sign(reject, p_plus, p_minus):
    if not reject:
        return Sign.NONE
    return Sign.POSITIVE if p_plus < p_minus else Sign.NEGATIVE


def directional_test(s, q):
    """Test H_{r/n} for one study vector.

    Args:
        s (StudyVector): the n z-scores.
        q (ReplicabilityQuery): n, r, alpha, combiner and rule.

    Returns:
        DirectionalResult
    """

    if s.n != q.n:
        raise DomainError(f'study vector has {s.n} studies, query expects {q.n}')

    pair = pc_pair(s, q.r, q.combiner)
    rule = resolve_rule(q)
    unproven = rule is Rule.MIN and not min_rule_is_valid(q.n, q.r, q.combiner)
    if unproven:
        logger.warning(
            f'Min rule requested for n={q.n}, r={q.r}, {q.combiner}: validity is not established'
        )

    p_final = float(final_pvalue(pair.p_plus, pair.p_minus, rule))
    reject = p_final <= q.alpha

    return DirectionalResult(
        p_plus=pair.p_plus,
        p_minus=pair.p_minus,
        p_final=p_final,
        rule_applied=rule,
        reject=reject,
        sign=_declare_sign(reject, pair.p_plus, pair.p_minus),
        unproven=unproven,
        n=q.n,
        r=q.r,
        combiner=q.combiner,
    )


@dataclass(frozen=True)
class BatchResult:
    """Row-wise directional test results; sign holds +1, -1 or 0."""

    p_plus: np.ndarray
    p_minus: np.ndarray
    p_final: np.ndarray
    reject: np.ndarray
    sign: np.ndarray
    rule_applied: Rule


def directional_test_batch(z, q):
    """Vectorized directional_test over the rows of a (reps, n) array."""

    z = np.atleast_2d(np.asarray(z, dtype=float))
    if z.shape[-1] != q.n:
        raise DomainError(f'z has {z.shape[-1]} columns, query expects {q.n}')

    rule = resolve_rule(q)
    p_plus, p_minus = pc_pvalues(z, q.r, q.combiner)
    p_final = final_pvalue(p_plus, p_minus, rule)
    reject = p_final <= q.alpha
    sign = np.where(reject, np.where(p_plus < p_minus, 1, -1), 0)

    return BatchResult(p_plus, p_minus, p_final, reject, sign, rule)


# =========================================================================
# Adaptive choice of r
# =========================================================================
@dataclass(frozen=True)
class AdaptiveStep:
    r: int
    p_final: float
    reject: bool
    sign: Sign


@dataclass(frozen=True)
class AdaptiveResult:
    """Sequential test of H_{k/n}, H_{k+1/n}, ... stopped at the first acceptance.

    `l` is the last rejected r (0 when H_{k/n} stands), a (1 - alpha) lower
    confidence bound for max(n+, n-). Only tested steps are recorded.
    """

    n: int
    k: int
    l: int
    per_step: Tuple[AdaptiveStep, ...]

    @property
    def untested(self):
        """Values of r never reached; these are not accepted, only untested."""

        last = self.per_step[-1].r if self.per_step else self.k - 1
        return list(range(last + 1, self.n + 1))

    @property
    def sign(self):
        """Declared direction at r = l."""

        for step in reversed(self.per_step):
            if step.reject:
                return step.sign
        return Sign.NONE

    def as_dict(self):
        return {
            'n': self.n,
            'k': self.k,
            'l': self.l,
            'sign': str(self.sign),
            'steps': [
                {'r': st.r, 'p_final': st.p_final, 'reject': st.reject, 'sign': str(st.sign)}
                for st in self.per_step
            ],
            'untested': self.untested,
        }


def first_adaptive_r(n):
    """k = ceil((n + 2) / 2), the first r with 2r > n + 1."""

    return (n + 3) // 2


def adaptive_r(s, alpha=0.05, combiner=Combiner.BONFERRONI):
    """Data adaptive r: test H_{k/n}, H_{k+1/n}, ..., H_{n/n} in turn at level alpha.

    Every r tested satisfies 2r > n + 1, so the AUTO rule applies the min
    rule for Bonferroni and Sidak and the doubled rule otherwise.
    """

    if s.n < 2:
        raise DomainError(f'adaptive r needs n >= 2, got {s.n}')
    check_alpha(alpha)
    combiner = Combiner.from_name(combiner)

    n = s.n
    k = first_adaptive_r(n)
    steps: List[AdaptiveStep] = []
    l = 0

    base = ReplicabilityQuery(n, k, alpha, combiner, Rule.AUTO)
    logger.debug('-' * 60)
    logger.debug(f'Adaptive plan: H_{k}/{n} .. H_{n}/{n} at alpha={alpha} ({combiner})')
    for r in range(k, n + 1):
        res = directional_test(s, base.with_r(r))
        steps.append(AdaptiveStep(r=r, p_final=res.p_final, reject=res.reject, sign=res.sign))
        logger.debug(
            f'  {r - k + 1}. H_{r}/{n}: p={res.p_final:.8g} ({res.rule_applied}) '
            f'{"rejected" if res.reject else "not rejected, stop"}'
        )
        if not res.reject:
            break
        l = r

    logger.debug(f'  lower confidence bound l={l}')
    logger.debug('-' * 60)

    return AdaptiveResult(n=n, k=k, l=l, per_step=tuple(steps))
