#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
replicez.tables
~~~~~~~~~~~~~

Reading feature tables of per-study z-scores (or p-values) and writing
CSV/JSON reports.

Input schema: a header ``feature_id,z1,...,zn`` followed by one row per
feature. Reports print floats with 8 significant digits in both formats.

:copyright: (c) 2010-2026 Regents of the University of Colorado
:license: MIT, see LICENSE for more details.
"""

import sys
import csv
import json
import logging
from contextlib import contextmanager
from typing import List, Tuple

from .definitions import DomainError, OutputFormat, TableError
from .partial_conjunction import StudyVector
from .utils import fmt_sig, round_sig

logger = logging.getLogger(__name__)


@contextmanager
def _open_input(src):
    if hasattr(src, 'read'):
        yield src
    elif src == '-':
        yield sys.stdin
    else:
        with open(src, 'r', encoding='utf-8', newline='') as fh:
            yield fh


@contextmanager
def _open_output(dst):
    if dst is None or dst == '-':
        yield sys.stdout
    elif hasattr(dst, 'write'):
        yield dst
    else:
        with open(dst, 'w', encoding='utf-8', newline='') as fh:
            yield fh


class FeatureTable:
    """Features sharing one study count n, each with its StudyVector."""

    def __init__(self, features: List[Tuple[str, StudyVector]], n=None):
        ids = [fid for fid, _ in features]
        if len(set(ids)) != len(ids):
            raise TableError('feature ids must be unique')

        sizes = {s.n for _, s in features}
        if len(sizes) > 1:
            raise TableError(f'features disagree on the number of studies: {sorted(sizes)}')

        self.features = list(features)
        self.n = sizes.pop() if sizes else n

    def __len__(self):
        return len(self.features)

    def __iter__(self):
        return iter(self.features)

    @classmethod
    def from_csv(cls, src, pvalues=False):
        """Parse a feature table.

        Args:
            src: a path, '-' for stdin, or an open text stream.
            pvalues (bool): values are right-sided p-values in (0, 1)
                rather than z-scores.

        Raises:
            TableError: on a malformed header or row, naming its line.
        """

        with _open_input(src) as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise TableError('empty input, expected a feature_id,z1,...,zn header', line=1)

            header = [h.strip() for h in header]
            if len(header) < 2 or header[0].lower() != 'feature_id':
                raise TableError('header must read feature_id,z1,...,zn', line=1)

            n = len(header) - 1
            features = []
            seen = set()
            for row in reader:
                line = reader.line_num
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) != n + 1:
                    raise TableError(f'expected {n + 1} fields, found {len(row)}', line=line)

                fid = row[0].strip()
                if not fid:
                    raise TableError('missing feature_id', line=line)
                if fid in seen:
                    raise TableError(f'duplicate feature_id "{fid}"', line=line)
                seen.add(fid)

                try:
                    values = [float(cell) for cell in row[1:]]
                    s = StudyVector.from_pvalues(values) if pvalues else StudyVector(values)
                except (ValueError, DomainError) as exc:
                    raise TableError(f'bad values for "{fid}": {exc}', line=line)

                features.append((fid, s))

        logger.info(f'Read {len(features)} features with n={n} studies')
        return cls(features, n=n)


class ReportWriter:
    @staticmethod
    def write(rows, columns, fmt=OutputFormat.CSV, dst=None):
        """Write report rows (dicts) as CSV or JSON.

        Args:
            rows (list): one dict per row; nested lists/dicts are JSON only.
            columns (list): column order for CSV output.
            fmt (OutputFormat or str): csv or json.
            dst: path, '-'/None for stdout, or an open text stream.
        """

        fmt = OutputFormat.from_name(fmt)
        with _open_output(dst) as fh:
            if fmt is OutputFormat.JSON:
                json.dump([_round_values(row) for row in rows], fh, indent=2)
                fh.write('\n')
            else:
                writer = csv.writer(fh, lineterminator='\n')
                writer.writerow(columns)
                for row in rows:
                    writer.writerow([fmt_sig(row.get(col, '')) for col in columns])

        if isinstance(dst, str) and dst != '-':
            logger.info(f'Wrote {len(rows)} rows to {dst}')


def _round_values(obj):
    if isinstance(obj, dict):
        return {key: _round_values(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_values(val) for val in obj]
    if isinstance(obj, float):
        return round_sig(obj)
    return obj
