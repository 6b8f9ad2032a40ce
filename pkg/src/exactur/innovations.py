"""Innovation laws, reproducible random streams and AR(1) path generators.

Every random draw in the package comes from a :class:`SeedSpec`. A stream
is identified by ``(master_seed, stream_index)`` plus an optional tuple of
sub-keys naming the task and replication block, so results never depend on
call order or on how many workers share the load.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Union

import numpy as np
from scipy.signal import lfilter

from .exceptions import InvalidSpec
from .series import Series

__all__ = [
    "SeedSpec",
    "Normal",
    "StudentT",
    "Stable",
    "Garch",
    "InnovationSpec",
    "spec_from_dict",
    "spec_to_dict",
    "make_rng",
    "generate",
    "gen_random_walk",
    "gen_ar1",
    "random_walk_from_innovations",
    "ar1_from_innovations",
    "batch_random_walk",
    "batch_ar1",
    "stationary_burn_in",
]


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if self.stream_index < 0:
            raise InvalidSpec("stream_index must be non-negative")


def make_rng(seed: SeedSpec, *key: int) -> np.random.Generator:
    """Counter-based stream: ``SeedSequence(master, spawn_key=(index, *key))``."""
    ss = np.random.SeedSequence(seed.master_seed % 2**64, spawn_key=(seed.stream_index, *key))
    return np.random.Generator(np.random.PCG64(ss))


def _shape(size) -> tuple:
    return (size,) if isinstance(size, (int, np.integer)) else tuple(size)


@dataclass(frozen=True)
class Normal:
    sd: float = 1.0
    law = "normal"

    def __post_init__(self):
        if not self.sd > 0:
            raise InvalidSpec("sd must be positive")

    def draw(self, rng: np.random.Generator, size) -> np.ndarray:
        return self.sd * rng.standard_normal(_shape(size))


@dataclass(frozen=True)
class StudentT:
    df: float = 5.0
    law = "t"

    def __post_init__(self):
        if not self.df > 0:
            raise InvalidSpec("df must be positive")

    def draw(self, rng, size):
        return rng.standard_t(self.df, _shape(size))


@dataclass(frozen=True)
class Stable:
    """Stable law with characteristic function

    ``exp(-scale |t|^alpha (1 - i beta sgn(t) tan(pi alpha / 2)) + i location t)``

    for ``alpha != 1`` (and the logarithmic form at ``alpha == 1``). Note that
    ``scale`` multiplies ``|t|^alpha`` directly, so the usual scale parameter
    is ``scale ** (1 / alpha)``. Sampled with the Chambers-Mallows-Stuck
    transform.
    """

    alpha: float = 1.5
    beta: float = 0.0
    scale: float = 1.0
    location: float = 0.0
    law = "stable"

    def __post_init__(self):
        if not 0 < self.alpha <= 2:
            raise InvalidSpec("alpha must lie in (0, 2]")
        if not abs(self.beta) <= 1:
            raise InvalidSpec("|beta| must be <= 1")
        if not self.scale > 0:
            raise InvalidSpec("scale must be positive")

    def draw(self, rng, size):
        shape = _shape(size)
        v = rng.uniform(-np.pi / 2, np.pi / 2, shape)
        w = rng.standard_exponential(shape)
        alpha, beta = self.alpha, self.beta
        if alpha == 1:
            gamma = self.scale
            half = np.pi / 2 + beta * v
            x = (2 / np.pi) * (half * np.tan(v) - beta * np.log((np.pi / 2) * w * np.cos(v) / half))
            return gamma * x + (2 / np.pi) * beta * gamma * math.log(gamma) + self.location
        zeta = beta * math.tan(np.pi * alpha / 2)
        b = math.atan(zeta) / alpha
        s = (1 + zeta * zeta) ** (1 / (2 * alpha))
        x = (
            s
            * np.sin(alpha * (v + b))
            / np.cos(v) ** (1 / alpha)
            * (np.cos(v - alpha * (v + b)) / w) ** ((1 - alpha) / alpha)
        )
        return self.scale ** (1 / alpha) * x + self.location


@dataclass(frozen=True)
class Garch:
    """GARCH(1,1) innovations ``a_t = sigma_t eps_t`` with standard normal ``eps_t``.

    The recursion starts at the stationary variance and runs ``burn_in``
    steps before the returned window.
    """

    omega: float = 1e-6
    alpha1: float = 0.2
    beta1: float = 0.7
    burn_in: int = 500
    law = "garch"

    def __post_init__(self):
        if not self.omega > 0:
            raise InvalidSpec("omega must be positive")
        if self.alpha1 < 0 or self.beta1 < 0:
            raise InvalidSpec("alpha1 and beta1 must be non-negative")
        if not self.alpha1 + self.beta1 < 1:
            raise InvalidSpec("alpha1 + beta1 must be < 1")
        if self.burn_in < 0:
            raise InvalidSpec("burn_in must be non-negative")

    @property
    def unconditional_variance(self) -> float:
        return self.omega / (1 - self.alpha1 - self.beta1)

    def draw(self, rng, size):
        shape = _shape(size)
        total = shape[-1] + self.burn_in
        eps = rng.standard_normal(shape[:-1] + (total,))
        out = np.empty_like(eps)
        var = np.full(shape[:-1], self.unconditional_variance)
        for t in range(total):
            out[..., t] = np.sqrt(var) * eps[..., t]
            var = self.omega + self.alpha1 * out[..., t] ** 2 + self.beta1 * var
        return out[..., self.burn_in :]


InnovationSpec = Union[Normal, StudentT, Stable, Garch]

_LAWS = {cls.law: cls for cls in (Normal, StudentT, Stable, Garch)}


def spec_from_dict(d: dict) -> InnovationSpec:
    """Build a spec from ``{"law": "stable", "alpha": 1.5, ...}``."""
    d = dict(d)
    law = d.pop("law", None)
    if law not in _LAWS:
        raise InvalidSpec(f"unknown law {law!r}; expected one of {sorted(_LAWS)}")
    try:
        return _LAWS[law](**d)
    except TypeError as exc:
        raise InvalidSpec(str(exc)) from None


def spec_to_dict(spec: InnovationSpec) -> dict:
    return {"law": spec.law, **asdict(spec)}


def generate(spec: InnovationSpec, n: int, seed: SeedSpec) -> np.ndarray:
    if n < 1:
        raise InvalidSpec("n must be positive")
    return spec.draw(make_rng(seed), n)


def random_walk_from_innovations(a) -> np.ndarray:
    return np.cumsum(a, axis=-1)


def ar1_from_innovations(a, rho: float, mu: float = 0.0) -> np.ndarray:
    """``z_t - mu = rho (z_{t-1} - mu) + a_t`` started from ``z_0 = mu``."""
    a = np.asarray(a, dtype=float)
    if rho == 1:
        return mu + np.cumsum(a, axis=-1)
    return mu + lfilter([1.0], [1.0, -rho], a, axis=-1)


def gen_random_walk(n: int, spec: InnovationSpec, seed: SeedSpec) -> Series:
    return Series(random_walk_from_innovations(generate(spec, n, seed)))


def stationary_burn_in(rho: float, tol: float = 1e-6, cap: int = 100_000) -> int:
    """Pre-sample length after which the start value's weight ``|rho|^k`` is below ``tol``."""
    if abs(rho) >= 1:
        return 0
    if rho == 0:
        return 1
    return min(cap, max(1, math.ceil(math.log(tol) / math.log(abs(rho)))))


def _check_start(start: str) -> None:
    if start not in ("fixed", "stationary"):
        raise InvalidSpec(f"start must be 'fixed' or 'stationary', got {start!r}")


def gen_ar1(
    n: int, rho: float, mu: float, spec: InnovationSpec, seed: SeedSpec, start: str = "fixed"
) -> Series:
    """AR(1) path around ``mu``.

    ``start="fixed"`` starts the recursion at ``z_0 = mu``. ``"stationary"``
    runs a discarded pre-sample (see :func:`stationary_burn_in`) so the
    returned window starts near the stationary law; it has no effect at
    ``rho = 1``.
    """
    if abs(rho) > 1:
        raise InvalidSpec("|rho| must be <= 1")
    _check_start(start)
    burn = stationary_burn_in(rho) if start == "stationary" else 0
    return Series(ar1_from_innovations(generate(spec, burn + n, seed), rho, mu)[burn:])


def batch_random_walk(spec: InnovationSpec, rng: np.random.Generator, reps: int, n: int) -> np.ndarray:
    return np.cumsum(spec.draw(rng, (reps, n)), axis=1)


def batch_ar1(spec, rng, reps: int, n: int, rho: float, mu: float = 0.0, start: str = "fixed") -> np.ndarray:
    _check_start(start)
    burn = stationary_burn_in(rho) if start == "stationary" else 0
    return ar1_from_innovations(spec.draw(rng, (reps, burn + n)), rho, mu)[:, burn:]
