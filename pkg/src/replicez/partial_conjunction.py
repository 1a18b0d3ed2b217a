#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
replicez.partial_conjunction
~~~~~~~~~~~~~

One-sided study p-values and the partial conjunction p-values
p+_{r/n} (at least r positive effects) and p-_{r/n} (at least r negative
effects) under the Bonferroni, Sidak, Simes and Fisher combining
functions.

All combining functions ignore the r - 1 smallest p-values and combine the
remaining n - r + 1 order statistics.

:copyright: (c) 2010-2026 Regents of the University of Colorado
:license: MIT, see LICENSE for more details.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from .definitions import Combiner, DomainError
from .numerics import norm_cdf, norm_sf, norm_quantile

logger = logging.getLogger(__name__)

DUALITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class StudyVector:
    """The n observed z-scores T_i ~ N(theta_i, 1), one per study."""

    z: np.ndarray

    def __post_init__(self):
        z = np.array(self.z, dtype=float).ravel()
        if z.size < 1:
            raise DomainError('a study vector needs at least one study')
        if not np.all(np.isfinite(z)):
            raise DomainError(f'z-scores must be finite, got {z}')

        z.flags.writeable = False
        object.__setattr__(self, 'z', z)

    @classmethod
    def from_pvalues(cls, pvalues):
        """Build z-scores from right-sided p-values, z_i = Phi^-1(1 - p_i)."""

        p = np.asarray(pvalues, dtype=float).ravel()
        if np.any(~((p > 0.0) & (p < 1.0))):
            raise DomainError(f'right-sided p-values must lie in (0, 1), got {p}')

        return cls(-np.atleast_1d(norm_quantile(p)))

    @property
    def n(self):
        return len(self.z)

    def __len__(self):
        return self.n

    def __neg__(self):
        return StudyVector(-self.z)

    def __repr__(self):
        return f'StudyVector(n={self.n}, z={self.z.tolist()})'


@dataclass(frozen=True)
class PcPValuePair:
    """Combined p-values for the two one-sided partial conjunction nulls."""

    p_plus: float
    p_minus: float
    r: int
    n: int
    combiner: Combiner
    # uncapped (n - r + 1) * p_(r) values, Bonferroni only
    raw_plus: Optional[float] = field(default=None, compare=False)
    raw_minus: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        check_r(self.r, self.n)

    def swapped(self):
        """The pair obtained from the negated study vector."""

        return PcPValuePair(
            self.p_minus, self.p_plus, self.r, self.n, self.combiner,
            raw_plus=self.raw_minus, raw_minus=self.raw_plus,
        )


def check_r(r, n, min_r=1):
    """Validate min_r <= r <= n for integer r."""

    if int(r) != r or not min_r <= r <= n:
        raise DomainError(f'r must be an integer in [{min_r}, {n}], got {r}')


def right_pvalues(s):
    """p_i = 1 - Phi(z_i), the p-values for H_i+: theta_i <= 0."""

    return np.atleast_1d(norm_sf(s.z))


def left_pvalues(s):
    """q_i = Phi(z_i) = 1 - p_i, the p-values for H_i-: theta_i >= 0."""

    return np.atleast_1d(norm_cdf(s.z))


def _sorted_pvalues(p, r):
    p = np.asarray(p, dtype=float)
    if p.ndim == 0 or p.shape[-1] == 0:
        raise DomainError('combine needs at least one p-value')
    if np.any(~((p >= 0.0) & (p <= 1.0))):
        raise DomainError('p-values must lie in [0, 1]')

    check_r(r, p.shape[-1])
    return np.sort(p, axis=-1, kind='stable')


def _unwrap(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def bonferroni_raw(p, r):
    """Uncapped Bonferroni partial conjunction value (n - r + 1) * p_(r)."""

    ps = _sorted_pvalues(p, r)
    m = ps.shape[-1] - r + 1
    return _unwrap(m * ps[..., r - 1])


def combine(p, r, combiner=Combiner.BONFERRONI):
    """Partial conjunction p-value for "at least r of n" from n p-values.

    With p_(1) <= ... <= p_(n) and m = n - r + 1:

    - bonferroni: min(1, m * p_(r))
    - sidak:      1 - (1 - p_(r))^m
    - simes:      min(1, min_i (m / i) * p_(r - 1 + i)), i = 1..m
    - fisher:     P(chi2_{2m} >= -2 * sum_{i=r..n} log p_(i)); a zero among
                  these order statistics yields 0.

    Args:
        p (array_like): p-values, shape (n,) or (..., n); combined along
            the last axis.
        r (int): 1 <= r <= n; r = 1 is the global null.
        combiner (Combiner or str): combining function.

    Returns:
        float, or an array with the leading shape of `p`.
    """

    combiner = Combiner.from_name(combiner)
    ps = _sorted_pvalues(p, r)
    n = ps.shape[-1]
    m = n - r + 1
    tail = ps[..., r - 1:]

    if combiner is Combiner.BONFERRONI:
        out = np.minimum(1.0, m * tail[..., 0])

    elif combiner is Combiner.SIDAK:
        with np.errstate(divide='ignore'):
            out = -np.expm1(m * np.log1p(-tail[..., 0]))

    elif combiner is Combiner.SIMES:
        weights = m / np.arange(1, m + 1)
        out = np.minimum(1.0, (tail * weights).min(axis=-1))

    elif combiner is Combiner.FISHER:
        with np.errstate(divide='ignore'):
            statistic = -2.0 * np.log(tail).sum(axis=-1)
        out = stats.chi2.sf(statistic, 2 * m)

    return _unwrap(np.clip(out, 0.0, 1.0))


def bonferroni_dual_p_minus(p, r):
    """Bonferroni p-_{r/n} from the sorted right-sided p-values alone.

    Since q_i = 1 - p_i, q_(r) = 1 - p_(n-r+1) and so
    p-_{r/n} = (n - r + 1) * (1 - p_(n-r+1)).

    Returns:
        tuple: (capped, raw) values.
    """

    ps = _sorted_pvalues(p, r)
    n = ps.shape[-1]
    m = n - r + 1
    raw = m * (1.0 - ps[..., n - r])
    return _unwrap(np.minimum(1.0, raw)), _unwrap(raw)


def pc_pvalues(z, r, combiner=Combiner.BONFERRONI):
    """Vectorized (p+, p-) for z-scores of shape (..., n)."""

    z = np.asarray(z, dtype=float)
    p_plus = combine(norm_sf(z), r, combiner)
    p_minus = combine(norm_cdf(z), r, combiner)
    return p_plus, p_minus


def pc_pair(s, r, combiner=Combiner.BONFERRONI):
    """Combined p-values p+_{r/n} and p-_{r/n} for one study vector.

    p- is combined from the left-sided q_i = Phi(z_i), so negating `s` swaps
    p+ and p- exactly. For Bonferroni the order-statistic route through the
    right-sided p-values is evaluated as well and checked against it.
    """

    combiner = Combiner.from_name(combiner)
    check_r(r, s.n)

    p = right_pvalues(s)
    q = left_pvalues(s)
    p_plus = combine(p, r, combiner)
    p_minus = combine(q, r, combiner)

    raw_plus = raw_minus = None
    if combiner is Combiner.BONFERRONI:
        raw_plus = bonferroni_raw(p, r)
        raw_minus = bonferroni_raw(q, r)
        dual, _ = bonferroni_dual_p_minus(p, r)
        if abs(dual - p_minus) > DUALITY_TOL:
            logger.warning(
                f'Bonferroni p- routes disagree: {p_minus!r} (left-sided) vs {dual!r} (order statistics)'
            )

    return PcPValuePair(
        p_plus=p_plus, p_minus=p_minus, r=int(r), n=s.n, combiner=combiner,
        raw_plus=raw_plus, raw_minus=raw_minus,
    )
