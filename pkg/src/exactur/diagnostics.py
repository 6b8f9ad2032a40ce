"""Residual checks that should pass before the AR(1) unit-root test is trusted."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.stats import chi2

from .exceptions import DegenerateResiduals, SeriesTooShort, TooFewLags
from .mle import exact_mle_mu
from .series import Series, center

__all__ = ["DiagReport", "ar1_residuals", "acf", "ljung_box", "default_lags", "adequacy_gate"]


@dataclass(frozen=True)
class DiagReport:
    residuals: np.ndarray = field(repr=False)
    acf: np.ndarray
    lb_stat: float
    lb_df: int
    lb_pvalue: float
    adequate: bool

    def to_dict(self) -> dict:
        return {
            "residuals": [float(x) for x in self.residuals],
            "acf": [float(x) for x in self.acf],
            "lb_stat": self.lb_stat,
            "lb_df": self.lb_df,
            "lb_pvalue": self.lb_pvalue,
            "adequate": self.adequate,
        }


def ar1_residuals(s: Series, rho: float, mean: float = 0.0) -> np.ndarray:
    """One-step residuals ``(z_t - mean) - rho (z_{t-1} - mean)`` for t = 2..n."""
    if s.n < 3:
        raise SeriesTooShort(f"need at least 3 observations, got {s.n}")
    z = s.values - mean
    return z[1:] - rho * z[:-1]


def acf(e, lags: int) -> np.ndarray:
    """Sample autocorrelations at lags ``1..lags`` (biased denominator)."""
    e = np.asarray(e, dtype=float)
    d = e - e.mean()
    denom = np.dot(d, d)
    if denom == 0:
        raise DegenerateResiduals("residuals have zero variance")
    return np.array([np.dot(d[k:], d[:-k]) / denom for k in range(1, lags + 1)])


def default_lags(m: int) -> int:
    return min(10, m // 5)


def ljung_box(e, lags: int) -> tuple[float, int, float]:
    """Ljung-Box portmanteau ``Q = m(m+2) sum r_k^2 / (m-k)``.

    One AR parameter has been fitted, so the reference chi-square has
    ``lags - 1`` degrees of freedom.

    Returns
    -------
    (lb_stat, lb_df, lb_pvalue)
    """
    e = np.asarray(e, dtype=float)
    m = e.size
    if lags < 2:
        raise TooFewLags("need at least 2 lags (one degree of freedom is used by the AR fit)")
    if not m > lags + 1:
        raise TooFewLags(f"{m} residuals are too few for {lags} lags")
    r = acf(e, lags)
    k = np.arange(1, lags + 1)
    q = float(m * (m + 2) * np.sum(r**2 / (m - k)))
    dof = lags - 1
    return q, dof, float(chi2.sf(q, dof))


def adequacy_gate(s: Series, lags: Optional[int] = None, level: float = 0.05) -> DiagReport:
    """Fit the mean-corrected exact MLE and test its residuals for autocorrelation.

    ``adequate`` is true when the Ljung-Box p-value exceeds ``level``.
    """
    fit = exact_mle_mu(s)
    mean = center(s).mean
    e = ar1_residuals(s, fit.rho_hat, mean)
    if lags is None:
        lags = default_lags(e.size)
    q, dof, p = ljung_box(e, lags)
    return DiagReport(e, acf(e, lags), q, dof, p, bool(p > level))
