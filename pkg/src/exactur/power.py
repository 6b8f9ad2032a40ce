"""Empirical size and power of the exact-MLE tests against Dickey-Fuller."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .critval import MAX_DEGENERATE_FRACTION, builtin_quantile, reject, simulate_null
from .exceptions import (
    DegenerateRegressionWarning,
    InvalidSpec,
    SeriesTooShort,
    SingularRegression,
    TooManyDegenerate,
    UnsupportedLevel,
)
from .innovations import InnovationSpec, Normal, SeedSpec, batch_ar1
from .parallel import run_blocks
from .series import Series
from .stats import Kind, batch_stats

__all__ = ["TESTS", "PowerCell", "df_stat", "batch_df", "get_power", "power_table", "moe"]

TESTS = ("DF", "MLEn", "MLEp")
LEVELS = (0.01, 0.05, 0.10)
MIN_REPS = 1000
DEFAULT_CV_REPS = 100_000
# relative RSS below which the DF regression counts as a perfect fit
_ZERO_RSS = 1e-24


def moe(p: float, reps: int) -> float:
    """95% binomial margin of error."""
    return 1.96 * math.sqrt(p * (1 - p) / reps)


@dataclass(frozen=True)
class PowerCell:
    n: int
    rho: float
    spec: InnovationSpec
    test: str
    level: float
    power: float
    reps: int
    moe: float


def batch_df(z: np.ndarray, return_flags: bool = False):
    """Dickey-Fuller pivotal statistic with intercept, row-wise.

    OLS of ``z_t`` on ``(1, z_{t-1})``; returns ``(rho_ls - 1) / se``.
    Perfect fits give 0 (flagged); a constant regressor gives NaN.
    """
    z = np.asarray(z, dtype=float)
    if z.ndim == 1:
        z = z[None, :]
    n = z.shape[1]
    if n < 4:
        raise SeriesTooShort(f"need at least 4 observations, got {n}")
    x = z[:, :-1] - z[:, :-1].mean(axis=1, keepdims=True)
    y = z[:, 1:] - z[:, 1:].mean(axis=1, keepdims=True)
    sxx = np.square(x).sum(axis=1)
    syy = np.square(y).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = (x * y).sum(axis=1) / sxx
        rss = np.square(y - rho[:, None] * x).sum(axis=1)
        perfect = rss <= _ZERO_RSS * syy
        se = np.sqrt(rss / (n - 3) / sxx)
        stat = np.where(perfect, 0.0, (rho - 1) / se)
    stat = np.where(sxx > 0, stat, np.nan)
    perfect &= sxx > 0
    return (stat, perfect) if return_flags else stat


def df_stat(s: Series) -> float:
    """Dickey-Fuller pivotal statistic for one series.

    Raises :class:`SingularRegression` for a constant regressor and warns
    with :class:`DegenerateRegressionWarning` when the fit is perfect.
    """
    stat, perfect = batch_df(s.values, return_flags=True)
    if not np.isfinite(stat[0]):
        raise SingularRegression("lagged regressor is constant")
    if perfect[0]:
        warnings.warn("zero residual variance; statistic set to 0", DegenerateRegressionWarning, stacklevel=2)
    return float(stat[0])


def _all_stats(z: np.ndarray) -> np.ndarray:
    mle = batch_stats(z, Kind.MEAN_CORRECTED)
    return np.column_stack([batch_df(z), mle["delta"], mle["tau"]])


@lru_cache(maxsize=256)
def _null_critical_values(n: int, level: float, cv_reps: int, seed: SeedSpec, threads) -> tuple[float, float]:
    """Gaussian-null quantiles of (DF, MLEn) at length ``n``."""
    sims = simulate_null(_all_stats, n, cv_reps, Normal(), seed, key=(41, n), threads=threads)
    return tuple(float(np.quantile(sims[:, j], level)) for j in (0, 1))


def _valid(col: np.ndarray) -> np.ndarray:
    good = np.isfinite(col)
    bad = col.size - int(good.sum())
    if bad and bad >= MAX_DEGENERATE_FRACTION * col.size:
        raise TooManyDegenerate(f"{bad} of {col.size} replications degenerate")
    return col[good]


def get_power(
    n_list: Sequence[int],
    rho_list: Sequence[float],
    spec: InnovationSpec = Normal(),
    tests: Iterable[str] = TESTS,
    level: float = 0.05,
    reps: int = 10_000,
    seed: SeedSpec = SeedSpec(0),
    cv_reps: int = DEFAULT_CV_REPS,
    start: str = "stationary",
    threads=1,
) -> list[PowerCell]:
    """Rejection rates over an ``(n, rho)`` grid.

    Each cell simulates ``reps`` paths from ``z_t = rho z_{t-1} + a_t`` with
    innovations from ``spec``. With ``start="stationary"`` the window is
    preceded by a discarded pre-sample; ``start="fixed"`` uses ``z_0 = 0``.
    ``rho = 1`` is the random walk from ``z_0 = 0`` either way. MLEp uses the published critical values; DF and MLEn use
    Gaussian-null critical values simulated at the same ``n``. All tests in
    a cell see the same paths. Streams depend only on ``(seed, n, rho)``.
    """
    tests = [t for t in TESTS if t in set(tests)]
    if not tests:
        raise InvalidSpec(f"tests must be drawn from {TESTS}")
    if reps < MIN_REPS:
        raise InvalidSpec(f"reps must be at least {MIN_REPS}")
    if not any(math.isclose(level, lv) for lv in LEVELS):
        raise UnsupportedLevel(f"level must be one of {LEVELS}")
    for rho in rho_list:
        if not -1 < rho <= 1:
            raise InvalidSpec(f"rho must lie in (-1, 1], got {rho}")

    cells = []
    for n in n_list:
        n = int(n)
        if n < 20:
            raise InvalidSpec("series length must be at least 20")
        cv_df, cv_mlen = _null_critical_values(n, level, cv_reps, seed, threads)
        cv = {"DF": cv_df, "MLEn": cv_mlen, "MLEp": builtin_quantile(level, n)}
        for rho in rho_list:
            rho = float(rho)

            def block(rng, size, rho=rho, n=n):
                return _all_stats(batch_ar1(spec, rng, size, n, rho, start=start))

            sims = run_blocks(block, reps, n, seed, key=(42, n, round(rho * 1_000_000)), threads=threads)
            for j, test in enumerate(TESTS):
                if test not in tests:
                    continue
                vals = _valid(sims[:, j])
                p = float(np.mean(reject(vals, cv[test])))
                cells.append(PowerCell(n, rho, spec, test, level, p, int(vals.size), moe(p, vals.size)))
    return cells


def power_table(cells: Sequence[PowerCell]) -> list[dict]:
    """Rows ``(n, rho, law, DF, MLEn, MLEp, moe)`` in percent.

    ``moe`` is the largest margin of error among the row's tests.
    """
    rows: dict[tuple, dict] = {}
    for c in cells:
        key = (c.n, c.rho, c.spec.law)
        row = rows.setdefault(key, {"n": c.n, "rho": c.rho, "law": c.spec.law, "moe": 0.0})
        row[c.test] = 100 * c.power
        row["moe"] = max(row["moe"], 100 * c.moe)
    return list(rows.values())
