"""Exact Gaussian maximum likelihood for the AR(1) coefficient.

The profile score of the stationary AR(1) likelihood is a cubic in rho,

    ((n-1)/n) c rho^3 - ((n-2)/n) b rho^2 - (c + a/n) rho + b,

with ``a``, ``b``, ``c`` from :func:`exactur.series.suffstats`. It is
non-negative at rho = -1 and non-positive at rho = 1, so exactly one of its
three real roots lies in [-1, 1]. That root is the middle one and is
obtained in closed form from the trigonometric solution of the cubic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateSeries, DomainError, NumericalFailure, SeriesTooShort
from .series import Series, SuffStats, center, suffstats

__all__ = [
    "MleResult",
    "score_cubic",
    "exact_mle",
    "exact_mle_mu",
    "loglik",
    "batch_mle",
]

# "inside the unit interval" means |rho| < 1 - UNIT_TOL
UNIT_TOL = 1e-12


@dataclass(frozen=True)
class MleResult:
    rho_hat: float
    boundary_flag: bool
    cubic_residual: float


def score_cubic(st: SuffStats, rho):
    """Left-hand side of the score cubic evaluated at ``rho``."""
    n = st.n
    return (
        (n - 1) / n * st.c * rho**3
        - (n - 2) / n * st.b * rho**2
        - (st.c + st.a / n) * rho
        + st.b
    )


def _monic_coeffs(a, b, c, n):
    g = b / c
    d2 = -(n - 2) / (n - 1) * g
    d1 = -n / (n - 1) * (1 + a / (n * c))
    d0 = n / (n - 1) * g
    return d2, d1, d0


def _trig_argument(d2, d1, d0):
    p = d2 * d2 - 3 * d1
    return (9 * d2 * d1 - 27 * d0 - 2 * d2**3) / (2 * p**1.5), p


def _trig_roots(d2, d1, d0):
    """All three real roots, ordered (largest, smallest, middle)."""
    arg, p = _trig_argument(d2, d1, d0)
    theta = np.arccos(np.clip(arg, -1.0, 1.0))
    amp = 2 * np.sqrt(p / 9)
    shift = d2 / 3
    return tuple(amp * np.cos(theta / 3 + 2 * np.pi * k / 3) - shift for k in range(3))


def _polish(rho, d2, d1, d0, steps=2):
    # Newton on the monic cubic, keeping a step only if it lowers |g|.
    for _ in range(steps):
        g = ((rho + d2) * rho + d1) * rho + d0
        dg = (3 * rho + 2 * d2) * rho + d1
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = rho - g / dg
        gc = ((cand + d2) * cand + d1) * cand + d0
        rho = np.where(np.isfinite(cand) & (np.abs(gc) < np.abs(g)), cand, rho)
    return rho


def batch_mle(a, b, c, n):
    """Vectorised root selection.

    Returns ``(rho_hat, boundary_flag)``. Entries with ``c == 0`` come back
    as NaN with the flag set; callers decide whether that is an error.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    ok = c > 0
    safe_c = np.where(ok, c, 1.0)
    d2, d1, d0 = _monic_coeffs(a, b, safe_c, n)
    largest, smallest, middle = (_polish(r, d2, d1, d0) for r in _trig_roots(d2, d1, d0))

    boundary = ~(np.abs(middle) < 1 - UNIT_TOL)
    if np.any(boundary):
        roots = np.stack([largest, smallest, middle])
        fallback = np.take_along_axis(roots, np.argmin(np.abs(roots), axis=0)[None], axis=0)[0]
        middle = np.where(boundary, fallback, middle)
    rho = np.where(ok, middle, np.nan)
    return rho, boundary | ~ok


def exact_mle(st: SuffStats) -> MleResult:
    """Exact MLE of rho from sufficient statistics.

    Raises
    ------
    DegenerateSeries
        If ``c == 0``.
    NumericalFailure
        If no finite root could be computed.
    """
    if st.n < 3:
        raise SeriesTooShort(f"need at least 3 observations, got {st.n}")
    if not st.c > 0:
        raise DegenerateSeries("interior sum of squares is zero")
    rho, flag = batch_mle(st.a, st.b, st.c, st.n)
    rho = float(rho)
    if not math.isfinite(rho):
        raise NumericalFailure(f"no real root found for {st}")
    return MleResult(rho, bool(flag), float(score_cubic(st, rho)))


def exact_mle_mu(s: Series) -> MleResult:
    """Exact MLE of rho after removing the sample mean."""
    if s.n < 4:
        raise SeriesTooShort(f"need at least 4 observations, got {s.n}")
    return exact_mle(suffstats(center(s)))


def loglik(s: Series, rho: float, sigma2: float) -> float:
    """Exact stationary Gaussian log-likelihood of a zero-mean AR(1)."""
    if not abs(rho) < 1:
        raise DomainError(f"|rho| must be < 1, got {rho}")
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    z = s.values
    n = s.n
    a = math.fsum(z * z)
    b = math.fsum(z[1:] * z[:-1])
    c = math.fsum(z[1:-1] ** 2)
    return (
        -n / 2 * math.log(2 * math.pi)
        - n / 2 * math.log(sigma2)
        + 0.5 * math.log(1 - rho * rho)
        - (a - 2 * rho * b + rho * rho * c) / (2 * sigma2)
    )
