#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
replicez.error_analysis
~~~~~~~~~~~~~

Type I and Type III error of the min-rule directional test.

The test rejects H_{r/n} when T_(n-r+1) >= t or T_(r) <= -t, with
t = Phi^-1(1 - alpha / (n - r + 1)) for Bonferroni. Writing
X = #{i: T_i <= -t} and Y = #{i: T_i >= t}, the rejection probability at a
parameter point theta is c(theta) = P(X >= r or Y >= r). When 2r > n + 1
the two events are disjoint and c(theta) = P(X >= r) + P(Y >= r), a sum
of Poisson-binomial tails.

Exact evaluators, the closed forms at the concordant and discordant
limiting points, the boundary supremum, the n = 3, r = 2 fixed-point
functions and the Monte Carlo estimators all live here.

:copyright: (c) 2010-2026 Regents of the University of Colorado
:license: MIT, see LICENSE for more details.
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Tuple

import numpy as np
from scipy import special

from .definitions import Combiner, DomainError, RegimeError, Rule
from .directional import check_alpha, directional_test_batch
from .numerics import (
    PoissonBinomial, norm_cdf, norm_pdf, norm_quantile, norm_sf, poisbin_tail, rng_stream,
)
from .partial_conjunction import check_r
from .utils import parse_theta_spec

logger = logging.getLogger(__name__)

# replicates per Monte Carlo block; block b always draws from rng_stream(seed, b)
MC_BLOCK = 50_000
# beyond this many terms binomial coefficients are taken in log space
LOG_COMB_LIMIT = 60


# =========================================================================
# Parameter points
# =========================================================================
@dataclass(frozen=True, eq=False)
class ThetaPoint:
    """A parameter vector theta with entries in the extended reals."""

    theta: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).ravel()
        if theta.size < 1:
            raise DomainError('theta needs at least one entry')
        if np.isnan(theta).any():
            raise DomainError('theta entries cannot be NaN')

        theta.flags.writeable = False
        object.__setattr__(self, 'theta', theta)

    @classmethod
    def from_spec(cls, spec):
        """Build from a "inf*9,-inf*9,0*2" style specification."""

        return cls(parse_theta_spec(spec))

    @classmethod
    def concordant(cls, n, r):
        """theta+: r - 1 entries at +inf, the rest 0."""

        check_r(r, n, min_r=1)
        theta = np.zeros(n)
        theta[:r - 1] = np.inf
        return cls(theta)

    @classmethod
    def discordant(cls, n, r):
        """theta~: r - 1 entries at +inf, r - 1 at -inf, the rest 0."""

        check_r(r, n, min_r=1)
        if 2 * r - 2 > n:
            raise RegimeError(f'the discordant point needs 2r - 2 <= n, got n={n}, r={r}')

        theta = np.zeros(n)
        theta[:r - 1] = np.inf
        theta[r - 1:2 * r - 2] = -np.inf
        return cls(theta)

    @property
    def n(self):
        return len(self.theta)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f'ThetaPoint({self.theta.tolist()})'

    def classify(self):
        """Return (n+, n-), the numbers of positive and negative entries."""

        return int((self.theta > 0).sum()), int((self.theta < 0).sum())

    def in_null(self, r):
        """Whether theta lies in the null space of H_{r/n}."""

        n_plus, n_minus = self.classify()
        return n_plus < r and n_minus < r

    def tail_probs(self, t):
        """Per-study P(T_i <= -t) and P(T_i >= t); infinite entries give 0 or 1."""

        theta = self.theta
        pos, neg = np.isposinf(theta), np.isneginf(theta)
        finite = ~(pos | neg)

        lower = np.where(neg, 1.0, 0.0)
        upper = np.where(pos, 1.0, 0.0)
        lower[finite] = norm_cdf(-t - theta[finite])
        upper[finite] = norm_sf(t - theta[finite])
        return lower, upper


def _as_theta(theta):
    return theta if isinstance(theta, ThetaPoint) else ThetaPoint(theta)


@dataclass(frozen=True)
class CurveRow:
    r: int
    c_concordant: float
    c_discordant: float


@dataclass(frozen=True)
class TypeOneCurve:
    """Type I error at the concordant and discordant points as r varies."""

    n: int
    alpha: float
    rows: Tuple[CurveRow, ...]


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo rejection frequency with its binomial standard error."""

    estimate: float
    std_error: float
    reps: int
    seed: int
    hits: int = field(default=0, compare=False)

    @classmethod
    def from_hits(cls, hits, reps, seed):
        est = hits / reps
        return cls(estimate=est, std_error=math.sqrt(est * (1.0 - est) / reps),
                   reps=reps, seed=seed, hits=int(hits))

    def as_dict(self):
        return {'estimate': self.estimate, 'std_error': self.std_error,
                'reps': self.reps, 'seed': self.seed}


# =========================================================================
# Thresholds and closed forms
# =========================================================================
def threshold_t(n, r, alpha, combiner=Combiner.BONFERRONI):
    """Rejection threshold t of the min-rule test.

    p+ <= alpha exactly when T_(n-r+1) >= t, and p- <= alpha exactly when
    T_(r) <= -t. Bonferroni: t = Phi^-1(1 - alpha / m); Sidak:
    t = Phi^-1((1 - alpha)^(1 / m)), with m = n - r + 1.
    """

    combiner = Combiner.from_name(combiner)
    check_r(r, n, min_r=1)
    check_alpha(alpha)
    m = n - r + 1

    if combiner is Combiner.BONFERRONI:
        tail = alpha / m
    elif combiner is Combiner.SIDAK:
        tail = -math.expm1(math.log1p(-alpha) / m)
    else:
        raise DomainError(f'no single threshold exists for the {combiner} combiner')

    return -norm_quantile(tail)


def _disjoint_regime(n, r):
    if not 2 * r > n + 1:
        raise RegimeError(f'requires 2r > n + 1, got n={n}, r={r}')


def _overlap_regime(n, r):
    check_r(r, n, min_r=2)
    if 2 * r > n + 1:
        raise RegimeError(f'requires 2 <= r <= (n + 1) / 2, got n={n}, r={r}')


def c_exact_disjoint(theta, r, alpha, combiner=Combiner.BONFERRONI):
    """c(theta) = P(X >= r) + P(Y >= r) in the disjoint regime 2r > n + 1."""

    theta = _as_theta(theta)
    n = theta.n
    check_r(r, n, min_r=1)
    _disjoint_regime(n, r)

    t = threshold_t(n, r, alpha, combiner)
    lower, upper = theta.tail_probs(t)
    return min(1.0, poisbin_tail(lower, r) + poisbin_tail(upper, r))


def c_exact(theta, r, alpha, combiner=Combiner.BONFERRONI):
    """Exact c(theta) = P(X >= r or Y >= r) at any theta and any r.

    The joint law of (X, Y) is built study by study: each T_i falls below
    -t, between -t and t, or above t, and the (n+1) x (n+1) table of
    P(X = x, Y = y) is convolved with these three outcomes.
    """

    theta = _as_theta(theta)
    n = theta.n
    check_r(r, n, min_r=1)

    t = threshold_t(n, r, alpha, combiner)
    lower, upper = theta.tail_probs(t)
    middle = np.clip(1.0 - lower - upper, 0.0, 1.0)

    joint = np.zeros((n + 1, n + 1))
    joint[0, 0] = 1.0
    for a, b, c in zip(lower, middle, upper):
        nxt = joint * b
        nxt[1:, :] += joint[:-1, :] * a
        nxt[:, 1:] += joint[:, :-1] * c
        joint = nxt

    return float(np.clip(1.0 - joint[:r, :r].sum(), 0.0, 1.0))


def sup_boundary(n, r, alpha, combiner=Combiner.BONFERRONI):
    """Supremum of c(theta) over the boundary set, 1 - (1 - alpha / m)^m.

    Attained as the first r - 1 entries go to infinity; equal to alpha
    only when r = n. For Sidak, 1 - (1 - alpha)^(m / m) is alpha itself.
    """

    combiner = Combiner.from_name(combiner)
    check_r(r, n, min_r=1)
    _disjoint_regime(n, r)
    check_alpha(alpha)

    m = n - r + 1
    if combiner is Combiner.SIDAK or m == 1:
        return float(alpha)
    if combiner is not Combiner.BONFERRONI:
        raise DomainError(f'no boundary supremum for the {combiner} combiner')

    return -math.expm1(m * math.log1p(-alpha / m))


def _binomial_terms(m, ks, p, q):
    """C(m, k) p^k q^(m-k) for each k in ks."""

    ks = np.asarray(ks, dtype=float)
    if m > LOG_COMB_LIMIT:
        log_comb = special.gammaln(m + 1) - special.gammaln(ks + 1) - special.gammaln(m - ks + 1)
        return np.exp(log_comb + ks * math.log(p) + (m - ks) * math.log(q))

    return special.comb(m, ks) * p ** ks * q ** (m - ks)


def c_concordant(n, r, alpha):
    """Closed-form c(theta+) for 2 <= r <= (n + 1) / 2.

    With m = n - r + 1 and t the Bonferroni threshold,
    c = 1 - Phi(t)^m + sum_{k=r}^{m} C(m, k) (1 - Phi(t))^k (2 Phi(t) - 1)^(m-k).
    The first term is the probability that one of the m null studies
    exceeds t.
    """

    _overlap_regime(n, r)
    t = threshold_t(n, r, alpha)
    m = n - r + 1
    tail = norm_sf(t)
    middle = 1.0 - 2.0 * tail

    first = -math.expm1(m * math.log1p(-tail))
    terms = _binomial_terms(m, np.arange(r, m + 1), tail, middle)
    return float(first + math.fsum(terms))


def c_discordant(n, r, alpha):
    """Closed-form c(theta~) = 1 - (2 Phi(t) - 1)^(n - 2r + 2) for 2 <= r <= (n + 1) / 2."""

    _overlap_regime(n, r)
    t = threshold_t(n, r, alpha)
    tail = norm_sf(t)
    return -math.expm1((n - 2 * r + 2) * math.log1p(-2.0 * tail))


def figure1_curve(n, alpha):
    """c(theta+) and c(theta~) for r = 2 .. floor((n + 1) / 2)."""

    if int(n) != n or n < 4:
        raise DomainError(f'the Type I curve needs n >= 4, got {n}')
    check_alpha(alpha)

    rows = tuple(
        CurveRow(r=r, c_concordant=c_concordant(n, r, alpha), c_discordant=c_discordant(n, r, alpha))
        for r in range(2, (n + 1) // 2 + 1)
    )
    logger.debug(f'Type I curve n={n}, alpha={alpha}: {len(rows)} rows')
    return TypeOneCurve(n=n, alpha=alpha, rows=rows)


def limiting_points(n, r):
    """(theta+, theta~); theta~ is None when 2r - 2 > n."""

    discordant = ThetaPoint.discordant(n, r) if 2 * r - 2 <= n else None
    return ThetaPoint.concordant(n, r), discordant


def c_gradient(theta, r, alpha):
    """Partial derivatives of c(theta) in the disjoint regime.

    dc/dtheta_i = -f(-t - theta_i) P(sum_{j != i} X_j = r - 1)
                  + f(t - theta_i) P(sum_{j != i} Y_j = r - 1);
    zero at infinite entries.
    """

    theta = _as_theta(theta)
    n = theta.n
    check_r(r, n, min_r=1)
    _disjoint_regime(n, r)

    t = threshold_t(n, r, alpha)
    lower, upper = theta.tail_probs(t)

    grad = np.zeros(n)
    for i in np.flatnonzero(np.isfinite(theta.theta)):
        rest = np.arange(n) != i
        px = PoissonBinomial(lower[rest]).pmf()[r - 1]
        py = PoissonBinomial(upper[rest]).pmf()[r - 1]
        th = theta.theta[i]
        grad[i] = -norm_pdf(-t - th) * px + norm_pdf(t - th) * py

    return grad


def small_case_limits(alpha):
    """Limiting Type I errors for n = 3, r = 2 (each equals alpha)."""

    inf = math.inf
    points = {
        'pos_inf_neg_inf': (inf, -inf, 0.0),
        'pos_inf_zero': (inf, 0.0, 0.0),
        'zero_neg_inf': (0.0, -inf, 0.0),
    }
    return {name: c_exact(theta, 2, alpha) for name, theta in points.items()}


# =========================================================================
# n = 3, r = 2 fixed-point functions
# =========================================================================
def h_fn(u, t):
    """h(u) = Phi(t) + Phi(t + u) - 2 Phi(t) Phi(t + u)."""

    big = norm_cdf(t)
    shifted = norm_cdf(np.asarray(t + np.asarray(u, dtype=float)))
    out = big + shifted - 2.0 * big * shifted
    return float(out) if np.ndim(out) == 0 else out


def g_fn(u, t):
    """g(u) = -(1 / (2t)) log[h(-u) / h(u)]."""

    u = np.asarray(u, dtype=float)
    out = -(np.log(h_fn(-u, t)) - np.log(h_fn(u, t))) / (2.0 * t)
    return float(out) if np.ndim(out) == 0 else out


def gg_curve(grid, alpha):
    """Evaluate g(g(theta_1)) on a grid, for n = 3, r = 2.

    A stationary point of c(theta) would be a fixed point of g o g on
    (0, inf); the curve stays below the identity there.

    Returns:
        np.ndarray: shape (len(grid), 2), columns theta_1 and g(g(theta_1)).
    """

    check_alpha(alpha)
    t = threshold_t(3, 2, alpha)
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    return np.column_stack((grid, g_fn(g_fn(grid, t), t)))


# =========================================================================
# Monte Carlo
# =========================================================================
def _block_sizes(reps):
    full, rest = divmod(reps, MC_BLOCK)
    return [MC_BLOCK] * full + ([rest] if rest else [])


def _run_blocks(count_block, reps, seed, workers=1):
    """Sum count_block(rng, size) over replicate blocks.

    Block b draws from rng_stream(seed, b), so the total is the same for
    any number of workers.
    """

    sizes = _block_sizes(reps)

    def job(b):
        hits = int(count_block(rng_stream(seed, b), sizes[b]))
        logger.debug(f'  block {b}: {hits}/{sizes[b]}')
        return hits

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return sum(ex.map(job, range(len(sizes))))

    return sum(job(b) for b in range(len(sizes)))


class _Sampler:
    """Draws T = theta + Z for the finite entries of a ThetaPoint."""

    def __init__(self, theta):
        self.theta = theta
        vals = theta.theta
        self.finite = np.isfinite(vals)
        self.n_pos = int(np.isposinf(vals).sum())
        self.n_neg = int(np.isneginf(vals).sum())
        self.mean = vals[self.finite]

    def finite_draws(self, rng, size):
        return self.mean + rng.standard_normal((size, self.mean.size))

    def full_draws(self, rng, size):
        z = np.empty((size, self.theta.n))
        z[:, self.finite] = self.finite_draws(rng, size)
        z[:, np.isposinf(self.theta.theta)] = np.inf
        z[:, np.isneginf(self.theta.theta)] = -np.inf
        return z

    def counts(self, rng, size, t, strict=False):
        """Per-replicate X = #{T_i <= -t} and Y = #{T_i >= t}."""

        draws = self.finite_draws(rng, size)
        if strict:
            x = (draws < -t).sum(axis=1)
            y = (draws > t).sum(axis=1)
        else:
            x = (draws <= -t).sum(axis=1)
            y = (draws >= t).sum(axis=1)
        return x + self.n_neg, y + self.n_pos


def _threshold_combiner(q):
    return q.combiner in (Combiner.BONFERRONI, Combiner.SIDAK)


def _check_mc(theta, q, reps):
    theta = _as_theta(theta)
    if theta.n != q.n:
        raise DomainError(f'theta has {theta.n} entries, query expects {q.n}')
    if int(reps) != reps or reps < 1:
        raise DomainError(f'reps must be a positive integer, got {reps}')
    return theta


def simulation_query(q):
    """AUTO simulates the min-rule events; only an explicit DOUBLE halves the level."""

    return replace(q, rule=Rule.MIN) if q.rule is Rule.AUTO else q


def mc_type1(theta, q, reps, seed, workers=1):
    """Monte Carlo rejection probability of the directional test at theta.

    Bonferroni and Sidak count the order-statistic events
    [T_(n-r+1) >= t] and [T_(r) <= -t] directly, with t taken at the
    per-direction level: alpha unless `q.rule` is DOUBLE, in which case
    alpha / 2. A query left on AUTO simulates the min-rule events. Simes and
    Fisher recompute the combined p-values. Infinite theta entries are not
    sampled, their indicators are fixed.

    Returns:
        McEstimate
    """

    theta = _check_mc(theta, q, reps)
    q = simulation_query(q)
    if not theta.in_null(q.r):
        logger.info(f'theta is outside the null of H_{q.r}/{q.n}; estimating power')

    sampler = _Sampler(theta)
    logger.info(
        f'Simulating Type I error: n={q.n}, r={q.r}, alpha={q.alpha}, {q.combiner}, '
        f'rule={q.applied_rule}, reps={reps}, seed={seed}'
    )

    if _threshold_combiner(q):
        t = threshold_t(q.n, q.r, q.level, q.combiner)

        def count_block(rng, size):
            x, y = sampler.counts(rng, size, t)
            return ((x >= q.r) | (y >= q.r)).sum()
    else:
        def count_block(rng, size):
            return directional_test_batch(sampler.full_draws(rng, size), q).reject.sum()

    return McEstimate.from_hits(_run_blocks(count_block, reps, seed, workers), reps, seed)


def mc_type3(theta, q, reps, seed, workers=1, declared_sign=False):
    """Monte Carlo probability of a wrong-direction rejection.

    With n+ >= r the wrong event is [T_(r) < -t] (p- below its level); with
    n- >= r it is [T_(n-r+1) > t]. With `declared_sign` the estimate is
    instead P(reject and the declared sign is wrong), which never exceeds
    the former.

    A query left on AUTO uses the min-rule level, as in mc_type1.

    Raises:
        DomainError: if theta has the wrong length or reps < 1, or unless
            exactly one of n+ >= r, n- >= r holds. Points with at least r
            effects in both directions have no single true direction, so
            no wrong one; this also rejects `simulate --mode type3` there.
    """

    theta = _check_mc(theta, q, reps)
    q = simulation_query(q)
    n_plus, n_minus = theta.classify()
    if (n_plus >= q.r) == (n_minus >= q.r):
        raise DomainError(
            f'Type III error needs exactly one direction with at least r={q.r} effects '
            f'(n+={n_plus}, n-={n_minus})'
        )

    truth_positive = n_plus >= q.r
    sampler = _Sampler(theta)
    logger.info(
        f'Simulating Type III error: n={q.n}, r={q.r}, alpha={q.alpha}, {q.combiner}, '
        f'rule={q.applied_rule}, reps={reps}, seed={seed}'
    )

    if declared_sign:
        wrong = -1 if truth_positive else 1

        def count_block(rng, size):
            res = directional_test_batch(sampler.full_draws(rng, size), q)
            return (res.reject & (res.sign == wrong)).sum()

    elif _threshold_combiner(q):
        t = threshold_t(q.n, q.r, q.level, q.combiner)

        def count_block(rng, size):
            x, y = sampler.counts(rng, size, t, strict=True)
            return ((x if truth_positive else y) >= q.r).sum()

    else:
        def count_block(rng, size):
            res = directional_test_batch(sampler.full_draws(rng, size), q)
            wrong_p = res.p_minus if truth_positive else res.p_plus
            return (wrong_p <= q.level).sum()

    return McEstimate.from_hits(_run_blocks(count_block, reps, seed, workers), reps, seed)
