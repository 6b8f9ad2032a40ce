"""Series container, CSV ingestion, centering and sufficient statistics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .exceptions import EmptySeries, ParseError, SeriesTooShort, UnitRootError

__all__ = [
    "Series",
    "CenteredSeries",
    "SuffStats",
    "load_series",
    "center",
    "suffstats",
    "batch_suffstats",
]


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float).ravel()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Series:
    """Ordered, finite, real-valued observations."""

    values: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.values)
        if arr.size == 0:
            raise EmptySeries("series has no observations")
        if not np.all(np.isfinite(arr)):
            raise UnitRootError("series contains non-finite values")
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class CenteredSeries:
    """A series with its sample mean removed; ``mean`` keeps what was subtracted."""

    values: np.ndarray
    mean: float

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class SuffStats:
    """Sums of squares and the lag-1 cross product of a series.

    ``a`` runs over all observations, ``b`` pairs each observation with its
    predecessor and ``c`` covers the interior points ``2..n-1`` only.
    """

    a: float
    b: float
    c: float
    n: int


def _parse_float(token: str) -> Optional[float]:
    try:
        return float(token)
    except ValueError:
        return None


def load_series(path: Union[str, Path], column: Union[int, str, None] = None) -> Series:
    """Read one column of a CSV file as a :class:`Series`.

    Lines starting with ``#`` and blank lines are skipped. The first
    remaining row is treated as a header when any of its fields fails to
    parse as a number. ``column`` is a zero-based index or, when the file
    has a header, a column name; it defaults to the first column.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    ParseError
        If a data field in the selected column is not a real number.
    EmptySeries
        If no data rows remain.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))

    rows: list[tuple[int, list[str]]] = []
    with path.open(newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = next(csv.reader([stripped]))
            rows.append((lineno, [f.strip() for f in fields]))

    header = None
    if rows and any(_parse_float(f) is None for f in rows[0][1]):
        header = rows.pop(0)[1]

    if column is None:
        idx = 0
    elif isinstance(column, int) or (isinstance(column, str) and column.isdigit()):
        idx = int(column)
    else:
        if header is None or column not in header:
            raise UnitRootError(f"column {column!r} not found in header")
        idx = header.index(column)

    values = []
    for lineno, fields in rows:
        if idx >= len(fields):
            raise ParseError(lineno, "")
        val = _parse_float(fields[idx])
        if val is None or not math.isfinite(val):
            raise ParseError(lineno, fields[idx])
        values.append(val)
    if not values:
        raise EmptySeries(f"no data rows in {path}")
    return Series(values)


def center(s: Series) -> CenteredSeries:
    mean = math.fsum(s.values) / s.n
    return CenteredSeries(s.values - mean, mean)


def suffstats(s: Union[Series, CenteredSeries]) -> SuffStats:
    """Sufficient statistics ``(a, b, c)`` with compensated summation."""
    z = np.asarray(s.values, dtype=float)
    n = z.size
    if n < 3:
        raise SeriesTooShort(f"need at least 3 observations, got {n}")
    a = math.fsum(z * z)
    b = math.fsum(z[1:] * z[:-1])
    c = math.fsum(z[1:-1] * z[1:-1])
    return SuffStats(a, b, c, n)


def batch_suffstats(z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row-wise ``(a, b, c)`` for a ``(reps, n)`` array of series.

    Uses numpy's pairwise summation; this is the simulation path.
    """
    z = np.asarray(z, dtype=float)
    if z.shape[-1] < 3:
        raise SeriesTooShort(f"need at least 3 observations, got {z.shape[-1]}")
    interior = z[..., 1:-1]
    c = np.square(interior).sum(axis=-1)
    a = c + z[..., 0] ** 2 + z[..., -1] ** 2
    b = (z[..., 1:] * z[..., :-1]).sum(axis=-1)
    return a, b, c
