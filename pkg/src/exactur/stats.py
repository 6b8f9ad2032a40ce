"""Normalized and pivotal unit-root statistics built on the exact MLE."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import SeriesTooShort, TauUndefined
from .mle import batch_mle, exact_mle, exact_mle_mu
from .series import Series, batch_suffstats, center, suffstats

__all__ = [
    "Kind",
    "Statistic",
    "TestOutcome",
    "sigma2_zero_mean",
    "sigma2_mean_corrected",
    "unit_root_stats",
    "batch_stats",
    "batch_statistic",
]


class Kind(str, enum.Enum):
    ZERO_MEAN = "zero"
    MEAN_CORRECTED = "mean"


class Statistic(str, enum.Enum):
    """The four statistics: normalized (delta) and pivotal (tau), with or without mean."""

    DELTA = "delta"
    TAU = "tau"
    DELTA_MU = "deltamu"
    TAU_MU = "taumu"

    @property
    def kind(self) -> Kind:
        return Kind.MEAN_CORRECTED if self in (Statistic.DELTA_MU, Statistic.TAU_MU) else Kind.ZERO_MEAN

    @property
    def pivotal(self) -> bool:
        return self in (Statistic.TAU, Statistic.TAU_MU)


@dataclass(frozen=True)
class TestOutcome:
    rho_hat: float
    delta: float
    tau: float
    sigma2_hat: float
    kind: Kind
    n: int
    boundary_flag: bool

    __test__ = False  # keep pytest from collecting this


def _resid_ss(z: np.ndarray, rho: float) -> float:
    e = z[1:] - rho * z[:-1]
    return math.fsum(e * e)


def sigma2_zero_mean(s: Series, rho: float) -> float:
    if s.n < 3:
        raise SeriesTooShort(f"need at least 3 observations, got {s.n}")
    return _resid_ss(s.values, rho) / (s.n - 2)


def sigma2_mean_corrected(s: Series, rho: float) -> float:
    if s.n < 4:
        raise SeriesTooShort(f"need at least 4 observations, got {s.n}")
    return _resid_ss(center(s).values, rho) / (s.n - 3)


def unit_root_stats(s: Series, kind: Kind = Kind.MEAN_CORRECTED) -> TestOutcome:
    """Compute ``delta = n(rho_hat - 1)`` and the pivotal ``tau`` for one series.

    For ``Kind.MEAN_CORRECTED`` everything is computed on the centered
    series and the variance estimate uses ``n - 3`` degrees of freedom.
    A boundary estimate is not an error; its flag is carried through.

    Raises
    ------
    SeriesTooShort, DegenerateSeries
        Propagated from the estimator.
    TauUndefined
        If the residual variance is exactly zero.
    """
    kind = Kind(kind)
    if kind is Kind.MEAN_CORRECTED:
        fit = exact_mle_mu(s)
        z = center(s).values
        sigma2 = sigma2_mean_corrected(s, fit.rho_hat)
    else:
        fit = exact_mle(suffstats(s))
        z = s.values
        sigma2 = sigma2_zero_mean(s, fit.rho_hat)
    if sigma2 == 0:
        raise TauUndefined("residual variance is zero")
    n = s.n
    rho = fit.rho_hat
    lagged_ss = math.fsum(z[:-1] * z[:-1])
    delta = n * (rho - 1)
    tau = math.sqrt(lagged_ss / sigma2) * (rho - 1)
    return TestOutcome(rho, delta, tau, sigma2, kind, n, fit.boundary_flag)


def batch_stats(z: np.ndarray, kind: Kind = Kind.MEAN_CORRECTED) -> dict[str, np.ndarray]:
    """Row-wise statistics for a ``(reps, n)`` array of series.

    Returns arrays ``rho``, ``delta``, ``tau``, ``sigma2`` and ``boundary``.
    Degenerate rows (zero interior sum of squares or zero residual
    variance) yield NaN in the affected outputs.
    """
    z = np.asarray(z, dtype=float)
    if z.ndim == 1:
        z = z[None, :]
    kind = Kind(kind)
    n = z.shape[1]
    if kind is Kind.MEAN_CORRECTED:
        if n < 4:
            raise SeriesTooShort(f"need at least 4 observations, got {n}")
        z = z - z.mean(axis=1, keepdims=True)
        dof = n - 3
    else:
        if n < 3:
            raise SeriesTooShort(f"need at least 3 observations, got {n}")
        dof = n - 2
    a, b, c = batch_suffstats(z)
    rho, boundary = batch_mle(a, b, c, n)
    resid = z[:, 1:] - rho[:, None] * z[:, :-1]
    sigma2 = np.square(resid).sum(axis=1) / dof
    lagged_ss = np.square(z[:, :-1]).sum(axis=1)
    delta = n * (rho - 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = np.where(sigma2 > 0, np.sqrt(lagged_ss / sigma2) * (rho - 1), np.nan)
    return {"rho": rho, "delta": delta, "tau": tau, "sigma2": sigma2, "boundary": boundary}


def batch_statistic(z: np.ndarray, stat: Statistic) -> np.ndarray:
    stat = Statistic(stat)
    out = batch_stats(z, stat.kind)
    return out["tau"] if stat.pivotal else out["delta"]
