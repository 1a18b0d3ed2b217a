#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
replicez.numerics
~~~~~~~~~~~~~

Standard normal distribution functions, the Poisson-binomial distribution
and the seeded random streams used by the Monte Carlo engine.

Every function accepting an "extended real" takes plain floats where
``float('inf')`` and ``-float('inf')`` stand for the two infinite symbols.
Infinite entries are routed through explicit masks before any arithmetic,
so no inf - inf or 0 * inf ever reaches a formula.

:copyright: (c) 2010-2026 Regents of the University of Colorado
:license: MIT, see LICENSE for more details.
"""

import math
import logging

import numpy as np
from scipy import special

from .definitions import DomainError

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
UINT64_MASK = 0xFFFF_FFFF_FFFF_FFFF


def _as_float_array(x):
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any():
        raise DomainError('NaN is not an extended real number')
    return arr


def _unwrap(arr):
    """Return python floats for 0-d results, arrays otherwise."""

    return float(arr) if np.ndim(arr) == 0 else arr


# =========================================================================
# Standard normal
# =========================================================================
def _cdf(x):
    out = np.empty_like(x)
    finite = np.isfinite(x)
    out[finite] = 0.5 * special.erfc(-x[finite] / SQRT2)
    out[np.isposinf(x)] = 1.0
    out[np.isneginf(x)] = 0.0
    return out


def _pdf(x):
    out = np.zeros_like(x)
    finite = np.isfinite(x)
    out[finite] = INV_SQRT_2PI * np.exp(-0.5 * x[finite] * x[finite])
    return out


def norm_cdf(x):
    """Standard normal CDF, exact at +/- infinity.

    Args:
        x (float or array_like): extended reals.

    Returns:
        float or np.ndarray: Phi(x).
    """

    return _unwrap(_cdf(_as_float_array(x)))


def norm_sf(x):
    """Upper tail 1 - Phi(x), evaluated as Phi(-x) to avoid cancellation."""

    return _unwrap(_cdf(-_as_float_array(x)))


def norm_pdf(x):
    """Standard normal density; zero at +/- infinity."""

    return _unwrap(_pdf(_as_float_array(x)))


def norm_quantile(u):
    """Standard normal quantile, Phi^-1(u) for u in (0, 1).

    The initial value comes from scipy's rational approximation (ndtri) and
    is refined by one Newton step against norm_cdf. The lower tail is always
    the one solved for: 1 - u is exact for u >= 0.5, so the result is
    antisymmetric bit for bit.

    Raises:
        DomainError: if any u is outside the open interval (0, 1).
    """

    u = _as_float_array(u)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise DomainError(f'quantile argument must lie in (0, 1), got {u}')

    upper = u > 0.5
    v = np.where(upper, 1.0 - u, u)

    x = np.asarray(special.ndtri(v), dtype=float)
    dens = _pdf(x)
    step = np.divide(_cdf(x) - v, dens, out=np.zeros_like(x), where=dens > 0)
    x = x - step

    return _unwrap(np.where(upper, -x, x))


# =========================================================================
# Poisson-binomial
# =========================================================================
class PoissonBinomial:
    """Distribution of a sum of independent Bernoulli variables.

    The PMF is built by direct convolution, one Bernoulli at a time
    (O(m^2)); the vectors met here hold at most a few hundred entries.
    """

    def __init__(self, probs):
        probs = np.asarray(probs, dtype=float).ravel()
        if np.any(~((probs >= 0.0) & (probs <= 1.0))):
            raise DomainError(f'Bernoulli probabilities must lie in [0, 1], got {probs}')

        self.probs = probs
        self._pmf = None

    def __repr__(self):
        return f'PoissonBinomial(m={self.m})'

    @property
    def m(self):
        return len(self.probs)

    @property
    def mean(self):
        return float(self.probs.sum())

    def pmf(self):
        """Return P(S = k) for k = 0..m as an array of length m + 1."""

        if self._pmf is None:
            pmf = np.zeros(self.m + 1)
            pmf[0] = 1.0
            for j, p in enumerate(self.probs):
                pmf[1:j + 2] = pmf[1:j + 2] * (1.0 - p) + pmf[:j + 1] * p
                pmf[0] *= 1.0 - p
            self._pmf = pmf

        return self._pmf.copy()

    def sf(self, k):
        """Return P(S >= k) for 0 <= k <= m + 1."""

        if int(k) != k or not 0 <= k <= self.m + 1:
            raise DomainError(f'tail index must be an integer in [0, {self.m + 1}], got {k}')

        k = int(k)
        if k == 0:
            return 1.0
        if k == self.m + 1:
            return 0.0

        return min(1.0, math.fsum(self.pmf()[k:]))


def poisbin_pmf(probs):
    """PMF of the Poisson-binomial distribution with success probabilities `probs`."""

    if isinstance(probs, PoissonBinomial):
        return probs.pmf()
    return PoissonBinomial(probs).pmf()


def poisbin_tail(probs, k):
    """P(S >= k) for the Poisson-binomial distribution with `probs`."""

    if isinstance(probs, PoissonBinomial):
        return probs.sf(k)
    return PoissonBinomial(probs).sf(k)


# =========================================================================
# Random streams
# =========================================================================
def rng_stream(seed, stream_id=0):
    """Return a deterministic generator of standard normal draws.

    The stream is numpy's PCG64 bit generator seeded by
    ``SeedSequence(entropy=seed, spawn_key=(stream_id,))`` (both reduced to
    unsigned 64 bits); draws come from ``Generator.standard_normal``.
    Identical (seed, stream_id) pairs give identical sequences, and
    distinct stream ids give independent streams. A generator belongs to a
    single worker.

    Args:
        seed (int): 64-bit seed.
        stream_id (int): stream index, e.g. the replicate block or worker index.

    Returns:
        np.random.Generator
    """

    seq = np.random.SeedSequence(
        entropy=int(seed) & UINT64_MASK,
        spawn_key=(int(stream_id) & UINT64_MASK,),
    )
    return np.random.Generator(np.random.PCG64(seq))
