#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
replicez
~~~~~~~~~~~~~

Directional r-out-of-n replicability tests for effects measured in n
independent studies.

:copyright: (c) 2010-2026 Regents of the University of Colorado
:license: MIT, see LICENSE for more details.
"""

__version__ = "0.1.0"
__credits__ = "CIRES"

from .definitions import (
    Combiner, Rule, Sign, ReplicezError, DomainError, RegimeError, TableError,
)
from .partial_conjunction import StudyVector, PcPValuePair, combine, pc_pair, right_pvalues, left_pvalues
from .directional import (
    ReplicabilityQuery, DirectionalResult, AdaptiveResult, directional_test,
    directional_test_batch, adaptive_r, min_rule_is_valid,
)
from .error_analysis import (
    ThetaPoint, TypeOneCurve, McEstimate, threshold_t, c_exact, c_exact_disjoint,
    c_concordant, c_discordant, sup_boundary, figure1_curve, gg_curve, mc_type1, mc_type3,
    simulation_query,
)
