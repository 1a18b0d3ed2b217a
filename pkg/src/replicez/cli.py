#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
replicez.cli
~~~~~~~~~~~~~

The replicez CLI.
Runs directional replicability tests on feature tables, emits the Type I
error curves and simulates error rates.

:copyright: (c) 2010-2026 Regents of the University of Colorado
:license: MIT, see LICENSE for more details.
"""

import sys
import math
import argparse
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .definitions import (
    Combiner, DomainError, OutputFormat, RegimeError, Rule, SimulationMode, TableError,
)
from .directional import ReplicabilityQuery, adaptive_r, check_alpha, directional_test
from .error_analysis import ThetaPoint, figure1_curve, gg_curve, mc_type1, mc_type3, simulation_query
from .tables import FeatureTable, ReportWriter

logging.basicConfig(level=logging.INFO, format='[ %(levelname)s ] %(name)s: %(message)s', stream=sys.stderr)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

TEST_COLUMNS = ['feature_id', 'n', 'r', 'combiner', 'p_plus', 'p_minus', 'p_final',
                'rule_applied', 'reject', 'sign', 'warning']
ADAPTIVE_COLUMNS = ['feature_id', 'n', 'k', 'l', 'r', 'p_final', 'reject', 'sign']
CURVE_COLUMNS = ['r', 'c_concordant', 'c_discordant', 'alpha', 'double_alpha']
GG_COLUMNS = ['theta1', 'gg', 'identity_gap']
SIM_COLUMNS = ['mode', 'n', 'r', 'alpha', 'combiner', 'rule_applied',
               'estimate', 'std_error', 'reps', 'seed']


@dataclass(frozen=True)
class RunConfig:
    """Settings for one CLI run, gathered from the parsed flags."""

    query: Optional[ReplicabilityQuery]
    seed: int = 0
    reps: int = 100_000
    fmt: OutputFormat = OutputFormat.CSV
    output: Optional[str] = None
    workers: int = 1

    @classmethod
    def from_args(cls, args, n=None, default_rule=Rule.AUTO):
        """Build the run configuration; the query needs both n and --r."""

        n = args.n if n is None else n
        if args.n is not None and n != args.n:
            raise DomainError(f'--n {args.n} does not match the input, which has n={n}')
        if args.reps < 1:
            raise DomainError(f'--reps must be >= 1, got {args.reps}')
        if args.workers < 1:
            raise DomainError(f'--workers must be >= 1, got {args.workers}')

        query = None
        if n is not None and args.r is not None:
            query = ReplicabilityQuery(
                n=n, r=args.r, alpha=args.alpha, combiner=args.combiner,
                rule=args.rule if args.rule is not None else default_rule,
            )

        return cls(query=query, seed=args.seed, reps=args.reps,
                   fmt=OutputFormat.from_name(args.format), output=args.output,
                   workers=args.workers)


def _require(value, flag):
    if value is None:
        raise DomainError(f'{flag} is required')
    return value


# =========================================================================
# Commands
# =========================================================================
def cmd_test(table, cfg):
    """One row per feature with its directional test result."""

    q = _require(cfg.query, '--r')
    rows = []
    for fid, s in table:
        res = directional_test(s, q)
        rows.append({'feature_id': fid, **res.as_dict()})

    n_rej = sum(row['reject'] for row in rows)
    logger.info(f'H_{q.r}/{q.n} rejected for {n_rej} of {len(rows)} features ({q.applied_rule} rule)')
    return rows, TEST_COLUMNS


def cmd_adaptive(table, cfg, alpha, combiner):
    """Adaptive r per feature; CSV carries one row per tested step."""

    results = []
    for fid, s in table:
        results.append((fid, adaptive_r(s, alpha, combiner)))

    if cfg.fmt is OutputFormat.JSON:
        return [{'feature_id': fid, **res.as_dict()} for fid, res in results], None

    rows = []
    for fid, res in results:
        for step in res.per_step:
            rows.append({
                'feature_id': fid, 'n': res.n, 'k': res.k, 'l': res.l,
                'r': step.r, 'p_final': step.p_final, 'reject': step.reject, 'sign': str(step.sign),
            })
    return rows, ADAPTIVE_COLUMNS


def cmd_type1_curve(n, alpha):
    curve = figure1_curve(n, alpha)
    rows = [
        {'r': row.r, 'c_concordant': row.c_concordant, 'c_discordant': row.c_discordant,
         'alpha': float(alpha), 'double_alpha': 2.0 * alpha}
        for row in curve.rows
    ]
    return rows, CURVE_COLUMNS


def gg_grid(grid_max, grid_step):
    """0, step, 2 step, ... up to grid_max; a last point within 1e-6 of grid_max snaps to it."""

    if not grid_step > 0 or not grid_max >= 0:
        raise DomainError(f'need grid-step > 0 and grid-max >= 0, got {grid_step}, {grid_max}')

    k = int(math.floor(grid_max / grid_step + 1e-9))
    grid = np.arange(k + 1) * grid_step
    if abs(grid[-1] - grid_max) <= 1e-6:
        grid[-1] = grid_max
    return grid


def cmd_gg_curve(alpha, grid_max, grid_step):
    check_alpha(alpha)
    curve = gg_curve(gg_grid(grid_max, grid_step), alpha)
    rows = [
        # + 0.0 turns g(g(0)) = -0.0 into 0.0
        {'theta1': float(th), 'gg': float(gg) + 0.0, 'identity_gap': float(gg - th) + 0.0}
        for th, gg in curve
    ]
    return rows, GG_COLUMNS


def cmd_simulate(theta, cfg, mode, declared_sign=False):
    q = simulation_query(_require(cfg.query, '--r'))
    mode = SimulationMode.from_name(mode)

    if mode is SimulationMode.TYPE1:
        est = mc_type1(theta, q, cfg.reps, cfg.seed, workers=cfg.workers)
    else:
        est = mc_type3(theta, q, cfg.reps, cfg.seed, workers=cfg.workers, declared_sign=declared_sign)

    logger.info(f'{mode} estimate {est.estimate:.8g} (SE {est.std_error:.2g})')
    row = {
        'mode': str(mode), 'n': q.n, 'r': q.r, 'alpha': float(q.alpha),
        'combiner': str(q.combiner), 'rule_applied': str(q.applied_rule), **est.as_dict(),
    }
    return [row], SIM_COLUMNS


# =========================================================================
# Argument parsing
# =========================================================================
def _shared_parser():
    shared = argparse.ArgumentParser(add_help=False)

    test_grp = shared.add_argument_group('Test Configuration')
    test_grp.add_argument('--n', type=int, help='Number of studies (checked against the input).')
    test_grp.add_argument('--r', type=int, help='Replicability requirement: at least r of n studies.')
    test_grp.add_argument('--alpha', type=float, default=0.05, help='Significance level in (0, 0.5).')
    test_grp.add_argument('--combiner', default=str(Combiner.BONFERRONI), choices=Combiner.names(),
                          type=str.lower, help='Partial conjunction combining function.')
    test_grp.add_argument('--rule', default=None, choices=Rule.names(), type=str.lower,
                          help='min, double, or auto (min wherever it is proven valid).\n'
                          'Default: auto, min for simulate.')

    sim_grp = shared.add_argument_group('Simulation')
    sim_grp.add_argument('--seed', type=int, default=0, help='Random seed.')
    sim_grp.add_argument('--reps', type=int, default=100_000, help='Monte Carlo replicates.')
    sim_grp.add_argument('--workers', type=int, default=1, help='Threads for the Monte Carlo blocks.')

    out_grp = shared.add_argument_group('Output')
    out_grp.add_argument('--format', default=str(OutputFormat.CSV), choices=OutputFormat.names(),
                         type=str.lower, help='Report format.')
    out_grp.add_argument('--output', help='Output file (default stdout).')

    sys_grp = shared.add_argument_group('System & Logging')
    sys_grp.add_argument('-q', '--quiet', action='store_true', help='Suppress log output.')
    sys_grp.add_argument('--verbose', action='store_true', help='Log per-step and per-block detail.')
    return shared


def build_parser():
    shared = _shared_parser()
    parser = argparse.ArgumentParser(
        prog='replicez',
        description=f'%(prog)s ({__version__}): Directional r-out-of-n replicability tests',
        formatter_class=argparse.RawTextHelpFormatter,
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    def add(name, help_msg):
        return sub.add_parser(name, parents=[shared], help=help_msg, description=help_msg,
                              formatter_class=argparse.RawTextHelpFormatter)

    for name, help_msg in (('test', 'Test H_{r/n} for every feature of a table.'),
                           ('adaptive', 'Choose r adaptively for every feature of a table.')):
        p = add(name, help_msg)
        p.add_argument('input', help='CSV with header feature_id,z1,...,zn ("-" for stdin).')
        p.add_argument('--pvalues', action='store_true',
                       help='Input holds right-sided p-values instead of z-scores.')

    add('type1-curve', 'Type I error at the concordant and discordant points, r = 2..(n+1)/2.')

    p = add('gg-curve', 'g(g(theta1)) for n = 3, r = 2 on a grid.')
    p.add_argument('--grid-max', type=float, default=3.0, help='Last grid point.')
    p.add_argument('--grid-step', type=float, default=1.0 / 3.0, help='Grid spacing.')

    p = add('simulate', 'Monte Carlo Type I or Type III error at a parameter point.')
    p.add_argument('--theta', required=True,
                   help='Comma separated theta, "inf"/"-inf" allowed, "a*k" repeats a k times.\n'
                   'e.g. "inf*9,-inf*9,0*2"')
    p.add_argument('--mode', default=str(SimulationMode.TYPE1), choices=SimulationMode.names(),
                   type=str.lower, help='Error to estimate.')
    p.add_argument('--declared-sign', action='store_true',
                   help='type3: count rejections whose declared sign is wrong.')

    return parser


def fix_argparse_theta(argv):
    """Attach the value to --theta so a leading "-inf" is not read as a flag."""

    fixed = []
    i = 0
    while i < len(argv):
        if argv[i] == '--theta' and i + 1 < len(argv):
            fixed.append(f'--theta={argv[i + 1]}')
            i += 2
        else:
            fixed.append(argv[i])
            i += 1
    return fixed


def _set_log_level(args):
    level = logging.INFO
    if args.quiet:
        level = logging.WARNING
    elif args.verbose:
        level = logging.DEBUG
    logging.getLogger('replicez').setLevel(level)


def run(args):
    """Dispatch a parsed command; returns the report rows and CSV columns."""

    if args.command in ('test', 'adaptive'):
        table = FeatureTable.from_csv(args.input, pvalues=args.pvalues)
        cfg = RunConfig.from_args(args, n=table.n)
        if args.command == 'test':
            return cmd_test(table, cfg), cfg
        return cmd_adaptive(table, cfg, args.alpha, args.combiner), cfg

    if args.command == 'type1-curve':
        cfg = RunConfig.from_args(args)
        return cmd_type1_curve(_require(args.n, '--n'), args.alpha), cfg

    if args.command == 'gg-curve':
        cfg = RunConfig.from_args(args)
        return cmd_gg_curve(args.alpha, args.grid_max, args.grid_step), cfg

    theta = ThetaPoint.from_spec(args.theta)
    cfg = RunConfig.from_args(args, n=theta.n, default_rule=Rule.MIN)
    return cmd_simulate(theta, cfg, args.mode, args.declared_sign), cfg


def main(argv=None):
    """Run the CLI and return its exit code."""

    parser = build_parser()
    try:
        args = parser.parse_args(fix_argparse_theta(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    _set_log_level(args)

    try:
        (rows, columns), cfg = run(args)
        ReportWriter.write(rows, columns, cfg.fmt, cfg.output)
    except (DomainError, RegimeError) as exc:
        logger.error(str(exc))
        return EXIT_USAGE
    except TableError as exc:
        logger.error(f'Malformed input: {exc}')
        return EXIT_RUNTIME
    except OSError as exc:
        logger.error(f'I/O error: {exc}')
        return EXIT_RUNTIME
    except Exception as exc:
        logger.error(f'Unexpected failure: {exc!r}')
        return EXIT_RUNTIME

    return EXIT_OK


def replicez_cli():
    sys.exit(main())


if __name__ == '__main__':
    replicez_cli()
