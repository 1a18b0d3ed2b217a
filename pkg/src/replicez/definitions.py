#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
replicez.definitions
~~~~~~~~~~~~~

This file contains the combining functions, decision rules and signs
used throughout replicez, along with their name lookups and the
exception hierarchy.

:copyright: (c) 2010-2026 Regents of the University of Colorado
:license: MIT, see LICENSE for more details.
"""

import enum
import logging

logger = logging.getLogger(__name__)


# =========================================================================
# Exceptions
# =========================================================================
class ReplicezError(ValueError):
    """Base class for replicez errors."""


class DomainError(ReplicezError):
    """An argument lies outside the domain of the operation."""


class RegimeError(ReplicezError):
    """A closed form was requested outside the 2r vs n+1 regime it holds in."""


class TableError(ReplicezError):
    """A malformed row in an input feature table."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)


# =========================================================================
# Enumerations
# =========================================================================
class _Named(enum.Enum):
    """Enum with a case-insensitive lookup by value or member name."""

    @classmethod
    def from_name(cls, name):
        """Return the member matching `name`, or raise DomainError."""

        if isinstance(name, cls):
            return name

        key = str(name).strip().lower()
        for member in cls:
            if key in (member.value, member.name.lower()):
                return member

        raise DomainError(
            f'Unknown {cls.__name__.lower()} "{name}"; expected one of: {", ".join(cls.names())}'
        )

    @classmethod
    def names(cls):
        return [member.value for member in cls]

    def __str__(self):
        return self.value


class Combiner(_Named):
    """Partial conjunction combining functions."""

    BONFERRONI = 'bonferroni'
    SIDAK = 'sidak'
    SIMES = 'simes'
    FISHER = 'fisher'


class Rule(_Named):
    """How the two one-sided combined p-values become one.

    MIN compares min(p+, p-) with alpha directly, DOUBLE uses the classical
    2 * min(p+, p-); AUTO picks MIN wherever its validity is established.
    """

    AUTO = 'auto'
    MIN = 'min'
    DOUBLE = 'double'


class Sign(_Named):
    """Direction declared for a replicated effect."""

    POSITIVE = 'positive'
    NEGATIVE = 'negative'
    NONE = 'none'

    @property
    def code(self):
        """Integer code used by the vectorized paths: +1, -1 or 0."""

        return {'positive': 1, 'negative': -1, 'none': 0}[self.value]

    @classmethod
    def from_code(cls, code):
        return {1: cls.POSITIVE, -1: cls.NEGATIVE, 0: cls.NONE}[int(code)]


class OutputFormat(_Named):
    CSV = 'csv'
    JSON = 'json'


class SimulationMode(_Named):
    TYPE1 = 'type1'
    TYPE3 = 'type3'
