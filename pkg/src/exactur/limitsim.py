"""Brownian functionals behind the limit laws of the exact-MLE statistics.

A standard Wiener process on [0, 1] is approximated by a scaled Gaussian
random walk ``z_1..z_N``: ``W(t) ~ z_[Nt] / sqrt(N)``. The integrals are
Riemann sums over the walk and the limit laws are assembled from them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from .exceptions import DegenerateFunctional, DegenerateSeries, InvalidSpec
from .innovations import SeedSpec, make_rng
from .parallel import run_blocks
from .series import CenteredSeries, Series, batch_suffstats, center, suffstats
from .stats import Statistic

__all__ = [
    "WienerFunctionals",
    "LemmaFunctionals",
    "NegativeRadicandWarning",
    "wiener_functionals",
    "batch_wiener_functionals",
    "limit_stat_draw",
    "linearized_delta",
    "lemma_functionals",
    "batch_lemma_functionals",
    "limit_quantiles",
]

DEFAULT_STEPS = 10_000


class NegativeRadicandWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class WienerFunctionals:
    """Integrals of W and the derived quantities of the two limit theorems.

    Fields are floats for a single draw or equal-length arrays for a batch.
    """

    int_W: Union[float, np.ndarray]
    int_W2: Union[float, np.ndarray]
    W1: Union[float, np.ndarray]
    A: Union[float, np.ndarray]
    B: Union[float, np.ndarray]
    C: Union[float, np.ndarray]
    A_mu: Union[float, np.ndarray]
    B_mu: Union[float, np.ndarray]
    C_mu: Union[float, np.ndarray]

    @classmethod
    def from_integrals(cls, int_W, int_W2, W1) -> "WienerFunctionals":
        A = int_W2
        A_mu = int_W2 - int_W**2
        if np.any(A <= 0) or np.any(A_mu <= 0):
            raise DegenerateFunctional("zero quadratic functional; RNG fault suspected")
        half = 0.5 * (W1**2 - 1)
        return cls(
            int_W=int_W,
            int_W2=int_W2,
            W1=W1,
            A=A,
            B=W1**2 / A,
            C=half / A,
            A_mu=A_mu,
            B_mu=(int_W**2 + (W1 - int_W) ** 2) / A_mu,
            C_mu=(half - W1 * int_W + int_W**2) / A_mu,
        )


@dataclass(frozen=True)
class LemmaFunctionals:
    c_norm: Union[float, np.ndarray]
    h_stat: Union[float, np.ndarray]
    g_stat: Union[float, np.ndarray]


def _walk_integrals(z: np.ndarray):
    steps = z.shape[-1]
    int_W = z.sum(axis=-1) / steps**1.5
    int_W2 = np.square(z).sum(axis=-1) / steps**2
    W1 = z[..., -1] / np.sqrt(steps)
    return int_W, int_W2, W1


def wiener_functionals(steps: int, seed: SeedSpec) -> WienerFunctionals:
    """One draw of the functionals from a ``steps``-long Gaussian walk."""
    if steps < 100:
        raise InvalidSpec("steps must be at least 100")
    z = np.cumsum(make_rng(seed).standard_normal(steps))
    return WienerFunctionals.from_integrals(*(float(v) for v in _walk_integrals(z)))


def batch_wiener_functionals(
    reps: int, steps: int = DEFAULT_STEPS, seed: SeedSpec = SeedSpec(0), threads=1
) -> WienerFunctionals:
    """``reps`` independent draws; deterministic for a given seed."""
    if steps < 100:
        raise InvalidSpec("steps must be at least 100")

    def block(rng, size):
        z = rng.standard_normal((size, steps))
        np.cumsum(z, axis=1, out=z)
        return np.column_stack(_walk_integrals(z))

    out = run_blocks(block, reps, steps, seed, key=(11,), threads=threads)
    return WienerFunctionals.from_integrals(out[:, 0], out[:, 1], out[:, 2])


def _bracket(c, b):
    rad = c * c - 4 * c + 2 * b
    neg = rad < 0
    return 0.5 * (c - np.sqrt(np.where(neg, 0.0, rad))), neg


def limit_stat_draw(kind: Statistic, f: WienerFunctionals, return_flags: bool = False):
    """Evaluate the limit-law expression for ``kind`` at the functionals ``f``.

    Normalized kinds give ``(C - sqrt(C^2 - 4C + 2B)) / 2``; pivotal kinds
    multiply that by ``sqrt(A)``. A negative radicand is clamped at zero and
    reported through :class:`NegativeRadicandWarning` (and through the flag
    array when ``return_flags`` is true).
    """
    kind = Statistic(kind)
    if kind in (Statistic.DELTA_MU, Statistic.TAU_MU):
        a, b, c = f.A_mu, f.B_mu, f.C_mu
    else:
        a, b, c = f.A, f.B, f.C
    value, neg = _bracket(np.asarray(c, dtype=float), np.asarray(b, dtype=float))
    if kind.pivotal:
        value = np.sqrt(a) * value
    count = int(np.count_nonzero(neg))
    if count:
        warnings.warn(f"{count} negative radicand(s) clamped at 0", NegativeRadicandWarning, stacklevel=2)
    if np.ndim(value) == 0:
        value, neg = float(value), bool(neg)
    return (value, neg) if return_flags else value


def linearized_delta(g_stat, h_stat):
    """First-order expansion of ``n(rho_mu - 1)`` in ``W = n(G-1)``, ``X = n(H-1)``."""
    value, _ = _bracket(np.asarray(g_stat, dtype=float), np.asarray(h_stat, dtype=float))
    return float(value) if np.ndim(value) == 0 else value


def lemma_functionals(s: Union[Series, CenteredSeries], sigma2: float) -> LemmaFunctionals:
    """``(c / (sigma2 n^2), n(H - 1), n(G - 1))`` with ``G = b/c``, ``H = a/c``.

    A :class:`Series` is centered first; a :class:`CenteredSeries` is used as is.
    """
    if s.n < 4:
        raise DegenerateSeries(f"need at least 4 observations, got {s.n}")
    cs = center(s) if isinstance(s, Series) else s
    st = suffstats(cs)
    if st.c == 0:
        raise DegenerateSeries("interior sum of squares is zero")
    n = st.n
    return LemmaFunctionals(
        c_norm=st.c / (sigma2 * n * n),
        h_stat=n * (st.a / st.c - 1),
        g_stat=n * (st.b / st.c - 1),
    )


def batch_lemma_functionals(z: np.ndarray, sigma2: float = 1.0) -> LemmaFunctionals:
    z = np.asarray(z, dtype=float)
    zc = z - z.mean(axis=-1, keepdims=True)
    a, b, c = batch_suffstats(zc)
    n = z.shape[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        return LemmaFunctionals(c / (sigma2 * n * n), n * (a / c - 1), n * (b / c - 1))


def limit_quantiles(
    kind: Statistic,
    alphas,
    reps: int,
    steps: int = DEFAULT_STEPS,
    seed: SeedSpec = SeedSpec(0),
    threads=1,
) -> tuple[list[dict], int]:
    """Empirical quantiles of the limit law; also returns the clamp count."""
    f = batch_wiener_functionals(reps, steps, seed, threads)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NegativeRadicandWarning)
        draws, neg = limit_stat_draw(kind, f, return_flags=True)
    qs = np.quantile(draws, alphas)
    rows = [
        {"kind": Statistic(kind).value, "alpha": float(al), "quantile": float(q),
         "reps": reps, "steps": steps, "seed": seed.master_seed}
        for al, q in zip(alphas, qs)
    ]
    return rows, int(np.count_nonzero(neg))
