"""Exact maximum-likelihood unit root tests for AR(1) series."""

__version__ = "0.1.0"

from .critval import (
    PUBLISHED_SURFACES,
    McResult,
    QuantilePoint,
    QuantileSurface,
    Resample,
    builtin_quantile,
    builtin_surface,
    estimate_quantiles,
    fit_surface,
    mc_test,
    reject,
)
from .diagnostics import DiagReport, adequacy_gate, ljung_box
from .exceptions import *  # noqa: F401,F403
from .innovations import Garch, Normal, SeedSpec, Stable, StudentT, gen_ar1, gen_random_walk
from .limitsim import WienerFunctionals, batch_wiener_functionals, limit_quantiles, limit_stat_draw
from .mle import MleResult, exact_mle, exact_mle_mu, loglik, score_cubic
from .power import PowerCell, df_stat, get_power, power_table
from .series import CenteredSeries, Series, SuffStats, center, load_series, suffstats
from .stats import Kind, Statistic, TestOutcome, unit_root_stats
