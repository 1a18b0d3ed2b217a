#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
replicez.utils
~~~~~~~~~~~~~

This holds various utility functions.

:copyright: (c) 2010-2026 Regents of the University of Colorado
:license: MIT, see LICENSE for more details.
"""

import math
import logging

from .definitions import DomainError

logger = logging.getLogger(__name__)

SIG_DIGITS = 8

_INF_TOKENS = {'inf': math.inf, '+inf': math.inf, 'infinity': math.inf,
               '-inf': -math.inf, '-infinity': -math.inf}


def _parse_value(token):
    key = token.strip().lower()
    if key in _INF_TOKENS:
        return _INF_TOKENS[key]

    try:
        value = float(key)
    except ValueError:
        raise DomainError(f'bad theta value "{token}"')
    if math.isnan(value):
        raise DomainError('theta values cannot be NaN')
    return value


def parse_theta_spec(spec):
    """Parse a comma separated theta specification.

    Tokens are numbers, "inf"/"-inf", or "a*k" for value a repeated k times,
    e.g. "inf*9,-inf*9,0*2".

    Returns:
        list: the expanded theta values.
    """

    if spec is None or not str(spec).strip():
        raise DomainError('empty theta specification')

    values = []
    for token in str(spec).split(','):
        token = token.strip()
        if not token:
            raise DomainError(f'empty token in theta specification "{spec}"')

        if '*' in token:
            val_str, count_str = token.rsplit('*', 1)
            try:
                count = int(count_str)
            except ValueError:
                raise DomainError(f'bad repeat count in "{token}"')
            if count < 1:
                raise DomainError(f'repeat count must be positive in "{token}"')
            values.extend([_parse_value(val_str)] * count)
        else:
            values.append(_parse_value(token))

    return values


def round_sig(x, digits=SIG_DIGITS):
    """Round a float to `digits` significant digits (through its text form)."""

    if x is None or isinstance(x, bool):
        return x
    return float(f'{float(x):.{digits}g}')


def fmt_sig(x, digits=SIG_DIGITS):
    """Text form of a value for reports; floats get `digits` significant digits."""

    if isinstance(x, bool):
        return 'true' if x else 'false'
    if isinstance(x, float):
        return f'{x:.{digits}g}'
    return str(x)
