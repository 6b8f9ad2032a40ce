"""Finite-sample critical values and Monte-Carlo p-values.

Quantiles of a statistic under the random-walk null are estimated by
simulation at several series lengths and smoothed across lengths with a
weighted response-surface regression

    Q(n) = theta_inf + theta1 / n + theta2 / n**2 + theta3 / n**3.

The published 1%, 5% and 10% surfaces for the mean-corrected pivotal
statistic are shipped as :data:`PUBLISHED_SURFACES`.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .exceptions import (
    DegenerateResiduals,
    InvalidSpec,
    LengthOutOfRange,
    SingularDesign,
    TooManyDegenerate,
    UnsupportedLevel,
)
from .innovations import InnovationSpec, Normal, SeedSpec, make_rng
from .parallel import run_blocks
from .series import Series, center
from .stats import Kind, Statistic, batch_statistic, unit_root_stats

__all__ = [
    "PUBLISHED_SURFACES",
    "MIN_BUILTIN_LENGTH",
    "QuantileSurface",
    "QuantilePoint",
    "McResult",
    "Resample",
    "builtin_quantile",
    "builtin_surface",
    "simulate_null",
    "estimate_quantiles",
    "fit_surface",
    "mc_test",
    "reject",
]

MIN_BUILTIN_LENGTH = 20
MAX_DEGENERATE_FRACTION = 1e-3

# theta_inf, theta1, theta2, theta3 for the mean-corrected pivotal statistic
PUBLISHED_SURFACES = {
    0.01: (-3.110, -4.652, -51.466, 0.0),
    0.05: (-2.531, -2.062, -17.529, 0.0),
    0.10: (-2.233, -1.219, -8.178, 0.0),
}


def _level_key(alpha: float) -> float:
    for level in PUBLISHED_SURFACES:
        if math.isclose(alpha, level, rel_tol=1e-9):
            return level
    raise UnsupportedLevel(f"no published surface at level {alpha}; use 0.01, 0.05 or 0.10")


def reject(statistic: float, critical_value: float) -> bool:
    """Left-tail decision with a closed rejection region."""
    return statistic <= critical_value


@dataclass(frozen=True)
class QuantileSurface:
    alpha: float
    theta_inf: float
    theta1: float
    theta2: float
    theta3: float = 0.0
    fitted_on: dict = field(default_factory=dict, compare=False)

    @property
    def theta(self) -> tuple[float, float, float, float]:
        return (self.theta_inf, self.theta1, self.theta2, self.theta3)

    def __call__(self, n):
        inv = 1.0 / np.asarray(n, dtype=float)
        q = self.theta_inf + inv * (self.theta1 + inv * (self.theta2 + inv * self.theta3))
        return float(q) if np.ndim(q) == 0 else q

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "theta": list(self.theta), "meta": dict(self.fitted_on)}

    @classmethod
    def from_dict(cls, d: dict) -> "QuantileSurface":
        theta = list(d["theta"]) + [0.0] * (4 - len(d["theta"]))
        return cls(float(d["alpha"]), *map(float, theta[:4]), fitted_on=d.get("meta", {}))

    @classmethod
    def load(cls, path) -> list["QuantileSurface"]:
        with open(path) as fh:
            data = json.load(fh)
        items = data if isinstance(data, list) else data.get("surfaces", [data])
        return [cls.from_dict(d) for d in items]


@dataclass(frozen=True)
class QuantilePoint:
    n: int
    alpha: float
    q_mean: float
    q_var: float
    N: int
    M: int


@dataclass(frozen=True)
class McResult:
    p_value: float
    k: int
    M: int
    observed: float


class Resample(str, enum.Enum):
    GAUSSIAN = "gaussian"
    BOOTSTRAP = "bootstrap"


def builtin_quantile(alpha: float, n: float) -> float:
    """Published critical value of the mean-corrected pivotal statistic.

    ``n`` may be ``math.inf`` for the asymptotic value.

    Raises
    ------
    UnsupportedLevel
        Unless ``alpha`` is 0.01, 0.05 or 0.10.
    LengthOutOfRange
        If ``n < 20``.
    """
    level = _level_key(alpha)
    if n < MIN_BUILTIN_LENGTH:
        raise LengthOutOfRange(f"published surfaces start at n={MIN_BUILTIN_LENGTH}, got {n}")
    t0, t1, t2, t3 = PUBLISHED_SURFACES[level]
    inv = 1.0 / n
    return t0 + inv * (t1 + inv * (t2 + inv * t3))


def builtin_surface(alpha: float) -> QuantileSurface:
    level = _level_key(alpha)
    return QuantileSurface(level, *PUBLISHED_SURFACES[level], fitted_on={"source": "published"})


StatFn = Union[Statistic, Callable[[np.ndarray], np.ndarray]]


def _stat_fn(stat: StatFn) -> Callable[[np.ndarray], np.ndarray]:
    if callable(stat) and not isinstance(stat, (Statistic, str)):
        return stat
    stat = Statistic(stat)
    return lambda z: batch_statistic(z, stat)


def _drop_degenerate(values: np.ndarray) -> np.ndarray:
    good = np.isfinite(values)
    if good.ndim > 1:
        good = good.all(axis=tuple(range(1, good.ndim)))
    bad = good.size - int(good.sum())
    if bad and bad >= MAX_DEGENERATE_FRACTION * good.size:
        raise TooManyDegenerate(f"{bad} of {good.size} replications degenerate")
    return values[good]


def simulate_null(
    stat: StatFn,
    n: int,
    reps: int,
    spec: InnovationSpec = Normal(),
    seed: SeedSpec = SeedSpec(0),
    key: tuple = (),
    threads=1,
) -> np.ndarray:
    """Statistic values on ``reps`` random walks of length ``n`` (z_0 = 0).

    Degenerate replications are dropped; 0.1% or more is an error.
    """
    fn = _stat_fn(stat)

    def block(rng, size):
        z = np.cumsum(spec.draw(rng, (size, n)), axis=1)
        return fn(z)

    return _drop_degenerate(run_blocks(block, reps, n, seed, key=key, threads=threads))


def estimate_quantiles(
    stat: StatFn,
    n: int,
    alphas: Sequence[float],
    N: int = 20_000,
    M: int = 20,
    spec: InnovationSpec = Normal(),
    seed: SeedSpec = SeedSpec(0),
    threads=1,
) -> list[QuantilePoint]:
    """Mean and variance over ``M`` repeats of ``N``-replication quantiles.

    Quantiles use linear interpolation between order statistics.
    """
    if N < 1000:
        raise InvalidSpec("N must be at least 1000")
    if M < 2:
        raise InvalidSpec("M must be at least 2 for a variance estimate")
    alphas = [float(a) for a in alphas]
    qs = np.empty((M, len(alphas)))
    for m in range(M):
        values = simulate_null(stat, n, N, spec, seed, key=(21, n, m), threads=threads)
        qs[m] = np.quantile(values, alphas)
    mean = qs.mean(axis=0)
    var = qs.var(axis=0, ddof=1)
    return [QuantilePoint(n, al, float(mu), float(v), N, M) for al, mu, v in zip(alphas, mean, var)]


def fit_surface(points: Sequence[QuantilePoint], degree: int = 2) -> QuantileSurface:
    """Weighted least squares of quantiles on powers of ``1/n``.

    Weights are ``1 / q_var``. ``degree`` 2 fixes ``theta3 = 0``.

    Raises
    ------
    SingularDesign
        Too few or repeated lengths, mixed levels, or a rank-deficient design.
    """
    if degree not in (2, 3):
        raise InvalidSpec("degree must be 2 or 3")
    points = list(points)
    if not points:
        raise SingularDesign("no points")
    alphas = {p.alpha for p in points}
    if len(alphas) != 1:
        raise SingularDesign(f"points mix levels {sorted(alphas)}")
    lengths = [p.n for p in points]
    if len(set(lengths)) != len(lengths):
        raise SingularDesign("duplicate series lengths")
    if len(lengths) < degree + 2:
        raise SingularDesign(f"need at least {degree + 2} lengths for degree {degree}, got {len(lengths)}")
    if any(not p.q_var > 0 for p in points):
        raise SingularDesign("every point needs a positive variance")

    inv_n = 1.0 / np.array(lengths, dtype=float)
    X = np.vander(inv_n, degree + 1, increasing=True)
    y = np.array([p.q_mean for p in points])
    sw = 1.0 / np.sqrt([p.q_var for p in points])
    Xw = X * sw[:, None]
    scale = np.linalg.norm(Xw, axis=0)
    coef, _, rank, _ = np.linalg.lstsq(Xw / scale, y * sw, rcond=None)
    if rank < degree + 1:
        raise SingularDesign("rank-deficient design")
    theta = list(coef / scale) + [0.0] * (3 - degree)
    meta = {
        "lengths": lengths,
        "N": sorted({p.N for p in points}),
        "M": sorted({p.M for p in points}),
        "degree": degree,
    }
    return QuantileSurface(points[0].alpha, *map(float, theta), fitted_on=meta)


def _observed_and_residuals(s: Series, stat: Statistic):
    out = unit_root_stats(s, stat.kind)
    z = center(s).values if stat.kind is Kind.MEAN_CORRECTED else s.values
    resid = z[1:] - out.rho_hat * z[:-1]
    observed = out.tau if stat.pivotal else out.delta
    return observed, resid


def mc_test(
    s: Series,
    stat: Statistic = Statistic.TAU_MU,
    M: int = 999,
    seed: SeedSpec = SeedSpec(0),
    resample: Resample = Resample.GAUSSIAN,
    threads=1,
) -> McResult:
    """Monte-Carlo p-value ``(k + 1) / (M + 1)`` for a left-tail test.

    ``k`` counts simulated null statistics at or below the observed value.
    The null walks use standard normal innovations, or with
    ``Resample.BOOTSTRAP`` innovations resampled from the centered AR(1)
    residuals of ``s``.
    """
    if M < 99:
        raise InvalidSpec("M must be at least 99")
    stat = Statistic(stat)
    resample = Resample(resample)
    observed, resid = _observed_and_residuals(s, stat)
    n = s.n
    fn = _stat_fn(stat)

    if resample is Resample.BOOTSTRAP:
        pool = resid - resid.mean()
        if not np.any(pool != 0):
            raise DegenerateResiduals("residuals have zero variance")

        def block(rng, size):
            return fn(np.cumsum(rng.choice(pool, size=(size, n)), axis=1))
    else:

        def block(rng, size):
            return fn(np.cumsum(rng.standard_normal((size, n)), axis=1))

    sims = _drop_degenerate(run_blocks(block, M, n, seed, key=(31,), threads=threads))
    k = int(np.count_nonzero(sims <= observed))
    m = int(sims.size)
    return McResult((k + 1) / (m + 1), k, m, float(observed))
