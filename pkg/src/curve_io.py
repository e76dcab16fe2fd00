#!/usr/bin/env python3
"""
Curve and Report I/O
====================

CSV ingestion of sampled loops, torus surface grids and torus self-maps, and
JSON/CSV emission of reports. JSON is written with sorted keys so identical
inputs give byte-identical files.
"""

import csv
import json
import logging
import sys
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from geometry import TWO_PI, LoopR4

logger = logging.getLogger(__name__)

CURVE_HEADER = ["t", "x1", "y1", "x2", "y2"]
SURFACE_HEADER = ["t1", "t2", "x1", "y1", "x2", "y2"]
MAP_HEADER = ["theta", "t", "f", "g"]


class InputFormatError(ValueError):
    """Malformed CSV input"""


def _read_rows(path: Path, header: List[str]) -> np.ndarray:
    path = Path(path)
    try:
        with open(path, newline='') as f:
            reader = csv.reader(f)
            first = next(reader, None)
            if first is None or [h.strip() for h in first] != header:
                raise InputFormatError(f"{path}: expected header {','.join(header)}, got {first}")
            rows = []
            for number, row in enumerate(reader, start=2):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) != len(header):
                    raise InputFormatError(f"{path}:{number}: expected {len(header)} fields, got {len(row)}")
                try:
                    rows.append([float(cell) for cell in row])
                except ValueError:
                    raise InputFormatError(f"{path}:{number}: non-numeric field in {row}") from None
    except OSError as e:
        raise InputFormatError(f"could not read {path}: {e}") from None
    if not rows:
        raise InputFormatError(f"{path}: no data rows")
    data = np.array(rows)
    if not np.all(np.isfinite(data)):
        raise InputFormatError(f"{path}: non-finite values")
    return data


def load_curve(path: Path) -> LoopR4:
    """Loop from `t,x1,y1,x2,y2` rows with t uniform on [0, 2*pi), closure implied"""
    data = _read_rows(path, CURVE_HEADER)
    t = data[:, 0]
    n = len(t)
    expected = TWO_PI * np.arange(n) / n
    if not np.allclose(t, expected, atol=1e-6):
        raise InputFormatError(f"{path}: t must be the uniform grid 2*pi*k/{n}")
    try:
        return LoopR4.from_samples(data[:, 1:], name=Path(path).stem)
    except ValueError as e:
        raise InputFormatError(f"{path}: {e}") from None


def load_surface_grid(path: Path) -> np.ndarray:
    """(N1, N2, 4) node grid from `t1,t2,x1,y1,x2,y2` rows on a uniform periodic grid"""
    data = _read_rows(path, SURFACE_HEADER)
    t1_values = np.unique(np.round(data[:, 0], 9))
    t2_values = np.unique(np.round(data[:, 1], 9))
    n1, n2 = len(t1_values), len(t2_values)
    if n1 * n2 != len(data):
        raise InputFormatError(f"{path}: {len(data)} rows do not form a {n1}x{n2} grid")
    if not (np.allclose(t1_values, TWO_PI * np.arange(n1) / n1, atol=1e-6)
            and np.allclose(t2_values, TWO_PI * np.arange(n2) / n2, atol=1e-6)):
        raise InputFormatError(f"{path}: grid parameters must be uniform on [0, 2*pi)")
    i = np.rint(data[:, 0] * n1 / TWO_PI).astype(int) % n1
    j = np.rint(data[:, 1] * n2 / TWO_PI).astype(int) % n2
    grid = np.full((n1, n2, 4), np.nan)
    grid[i, j] = data[:, 2:]
    if np.isnan(grid).any():
        raise InputFormatError(f"{path}: grid has missing or repeated nodes")
    return grid


def load_torus_map(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    """
    Images of the two basis cycles from `theta,t,f,g` rows: the rows with t = 0
    (ordered by theta) and the rows with theta = 0 (ordered by t).
    """
    data = _read_rows(path, MAP_HEADER)
    theta_rows = data[np.isclose(data[:, 1], 0.0)]
    t_rows = data[np.isclose(data[:, 0], 0.0)]
    if len(theta_rows) < 16 or len(t_rows) < 16:
        raise InputFormatError(f"{path}: need at least 16 samples on each of the cycles theta=0 and t=0")
    theta_rows = theta_rows[np.argsort(theta_rows[:, 0])]
    t_rows = t_rows[np.argsort(t_rows[:, 1])]
    return theta_rows[:, 2:], t_rows[:, 2:]


def write_curve(path: Path, loop: LoopR4, samples: Optional[int] = None):
    t, points, _ = loop.sample(samples)
    write_rows(path, CURVE_HEADER, np.column_stack([t, points]))


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[float]]):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    logger.info(f"Wrote {path}")


def dump_json(payload: dict, out: Optional[Path] = None):
    """Pretty JSON with sorted keys to `out` or stdout"""
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, 'w') as f:
            f.write(text)
        logger.info(f"Report saved to {out}")
