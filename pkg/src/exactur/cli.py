"""Command-line interface.

Results go to stdout, logs and warnings to stderr. Every output embeds the
seed, package version and an echo of the configuration (worker count
excluded, since it never changes results). Exit codes: 2 for data errors,
3 for unsupported configurations; errors are also written to stderr as JSON.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from typing import Optional, Sequence

from . import __version__
from .critval import (
    QuantileSurface,
    Resample,
    builtin_quantile,
    estimate_quantiles,
    fit_surface,
    mc_test,
    reject,
)
from .diagnostics import adequacy_gate
from .exceptions import (
    DegenerateResiduals,
    DegenerateSeries,
    EmptySeries,
    NumericalFailure,
    ParseError,
    SeriesTooShort,
    TauUndefined,
    TooFewLags,
    TooManyDegenerate,
    UnitRootError,
)
from .innovations import Garch, Normal, SeedSpec, Stable, StudentT, spec_from_dict, spec_to_dict
from .limitsim import DEFAULT_STEPS, limit_quantiles
from .power import TESTS, get_power, power_table
from .series import load_series
from .stats import Kind, Statistic, unit_root_stats

log = logging.getLogger("exactur")

DATA_ERRORS = (
    FileNotFoundError,
    ParseError,
    EmptySeries,
    SeriesTooShort,
    DegenerateSeries,
    TauUndefined,
    DegenerateResiduals,
    TooFewLags,
    NumericalFailure,
    TooManyDegenerate,
)

TABLE1_N = (30, 70, 100, 200)
TABLE1_RHO = (0.65, 0.85, 0.9, 0.95, 1.0)
QUICK_N = (30, 100, 200)
QUICK_RHO = (0.65, 0.85, 1.0)

_NAMED_LAWS = {
    "normal": Normal(),
    "t": StudentT(5.0),
    "stable": Stable(1.5, 0.0, 1.0, 0.0),
    "garch": Garch(1e-6, 0.2, 0.7),
}


class ConfigError(UnitRootError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("ConfigError", message)
        sys.exit(3)


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _law(text: str):
    if text in _NAMED_LAWS:
        return _NAMED_LAWS[text]
    try:
        return spec_from_dict(json.loads(text))
    except json.JSONDecodeError:
        raise ConfigError(f"law must be one of {sorted(_NAMED_LAWS)} or a JSON object") from None


def _threads(text: str):
    if text == "auto":
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("threads must be a positive integer or 'auto'") from None
    if value < 1:
        raise argparse.ArgumentTypeError("threads must be a positive integer or 'auto'")
    return value


def _levels(text: str) -> list[float]:
    return [v / 100 for v in _floats(text)]


def _pct(alpha: float) -> str:
    return f"{alpha * 100:g}pct"


def _meta(args) -> dict:
    config = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("threads", "func") and v is not None
    }
    return {"version": __version__, "seed": args.seed, "config": _jsonable(config)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "law"):
        return spec_to_dict(obj)
    if isinstance(obj, (Kind, Statistic)):
        return obj.value
    return obj


def _write_json(payload: dict, out) -> None:
    out.write(json.dumps(payload, indent=2, allow_nan=True) + "\n")


def _write_csv(rows: list[dict], columns: Sequence[str], meta: dict, out) -> None:
    out.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    out.write(buf.getvalue())


def _seed(args) -> SeedSpec:
    return SeedSpec(args.seed)


# -- commands ---------------------------------------------------------------


def cmd_test(args, out) -> int:
    s = load_series(args.input, args.column)
    kind = Kind(args.kind)
    outcome = unit_root_stats(s, kind)
    stat = Statistic.TAU_MU if kind is Kind.MEAN_CORRECTED else Statistic.TAU
    levels = args.levels

    if args.mc:
        points = estimate_quantiles(stat, s.n, levels, args.N, args.M, seed=_seed(args), threads=args.threads)
        cvs = {p.alpha: p.q_mean for p in points}
        source = "simulated"
    elif args.surface:
        surfaces = {round(sf.alpha, 10): sf for sf in QuantileSurface.load(args.surface)}
        missing = [lv for lv in levels if round(lv, 10) not in surfaces]
        if missing:
            raise ConfigError(f"surface file has no level(s) {missing}")
        cvs = {lv: surfaces[round(lv, 10)](s.n) for lv in levels}
        source = "surface-file"
    elif kind is Kind.MEAN_CORRECTED:
        cvs = {lv: builtin_quantile(lv, s.n) for lv in levels}
        source = "builtin"
    else:
        raise ConfigError("zero-mean test needs --surface FILE or --mc")

    report = {
        "meta": _meta(args),
        "n": s.n,
        "kind": kind.value,
        "rho_hat": outcome.rho_hat,
        "delta": outcome.delta,
        "tau": outcome.tau,
        "sigma2_hat": outcome.sigma2_hat,
        "boundary_flag": outcome.boundary_flag,
        "critical_value_source": source,
        "critical_values": {_pct(lv): cv for lv, cv in cvs.items()},
    }
    for lv, cv in cvs.items():
        report[f"reject_{_pct(lv)}"] = reject(outcome.tau, cv)
    report["diagnostics"] = _diagnostics(s, args.lags)
    _write_json(report, out)
    return 0


def _diagnostics(s, lags) -> dict:
    try:
        diag = adequacy_gate(s, lags)
    except UnitRootError as exc:
        log.warning("diagnostics unavailable: %s", exc)
        return {"error": type(exc).__name__, "message": str(exc)}
    if not diag.adequate:
        log.warning(
            "WARNING: residual autocorrelation detected (Ljung-Box p=%.4g); "
            "the AR(1) model looks inadequate and the unit-root test may mislead",
            diag.lb_pvalue,
        )
    return diag.to_dict()


def cmd_mctest(args, out) -> int:
    s = load_series(args.input, args.column)
    res = mc_test(
        s,
        Statistic(args.kind),
        args.M,
        _seed(args),
        Resample.BOOTSTRAP if args.bootstrap else Resample.GAUSSIAN,
        threads=args.threads,
    )
    _write_json({"meta": _meta(args), "p_value": res.p_value, "k": res.k, "M": res.M, "observed": res.observed}, out)
    return 0


_QCOLS = ("kind", "n", "alpha", "q_mean", "q_var", "N", "M")


def _qrow(kind, p) -> dict:
    return {"kind": kind, "n": p.n, "alpha": p.alpha, "q_mean": p.q_mean, "q_var": p.q_var, "N": p.N, "M": p.M}


def cmd_cv(args, out) -> int:
    stat = Statistic(args.kind)
    rows = []
    for n in args.n:
        if args.simulate or stat is not Statistic.TAU_MU:
            if not args.simulate:
                raise ConfigError("only the taumu statistic has built-in critical values; pass --simulate")
            pts = estimate_quantiles(stat, n, args.levels, args.N, args.M, args.law, _seed(args), args.threads)
            rows.extend(_qrow(stat.value, p) for p in pts)
        else:
            for lv in args.levels:
                q = builtin_quantile(lv, n)
                rows.append({"kind": stat.value, "n": n, "alpha": lv, "q_mean": q, "q_var": 0.0, "N": None, "M": None})
    if args.format == "csv":
        _write_csv(rows, _QCOLS, _meta(args), out)
    else:
        _write_json({"meta": _meta(args), "critical_values": rows}, out)
    return 0


def cmd_fit_surface(args, out) -> int:
    stat = Statistic(args.kind)
    by_alpha: dict[float, list] = {lv: [] for lv in args.alpha}
    for n in args.lengths:
        for p in estimate_quantiles(stat, n, args.alpha, args.N, args.M, args.law, _seed(args), args.threads):
            log.info("n=%d alpha=%g q=%.5f var=%.3g", p.n, p.alpha, p.q_mean, p.q_var)
            by_alpha[p.alpha].append(p)
    surfaces = [fit_surface(pts, args.degree) for pts in by_alpha.values()]
    rows = [_qrow(stat.value, p) for pts in by_alpha.values() for p in pts]
    if args.format == "csv":
        _write_csv(rows, _QCOLS, _meta(args), out)
    else:
        _write_json(
            {
                "meta": _meta(args),
                "surfaces": [{**sf.to_dict(), "meta": {**sf.fitted_on, "kind": stat.value}} for sf in surfaces],
                "points": rows,
            },
            out,
        )
    return 0


def cmd_simlimit(args, out) -> int:
    rows, clamped = limit_quantiles(Statistic(args.kind), args.alphas, args.reps, args.steps, _seed(args), args.threads)
    if clamped:
        log.warning("%d negative radicand(s) clamped at zero", clamped)
    cols = ("kind", "alpha", "quantile", "reps", "steps", "seed")
    if args.format == "json":
        _write_json({"meta": _meta(args), "quantiles": rows, "clamped": clamped}, out)
    else:
        _write_csv(rows, cols, _meta(args), out)
    return 0


def cmd_power(args, out) -> int:
    if args.grid == "table1":
        n_list, rho_list = TABLE1_N, TABLE1_RHO
    else:
        n_list, rho_list = QUICK_N, QUICK_RHO
    n_list = args.n or n_list
    rho_list = args.rho or rho_list
    cells = get_power(
        n_list,
        rho_list,
        args.law,
        args.tests,
        args.level,
        args.reps,
        _seed(args),
        cv_reps=args.cv_reps,
        start=args.start,
        threads=args.threads,
    )
    rows = power_table(cells)
    cols = ("n", "rho", "law", *[t for t in TESTS if t in args.tests], "moe")
    if args.format == "json":
        _write_json({"meta": _meta(args), "table": rows}, out)
    else:
        _write_csv(rows, cols, _meta(args), out)
    return 0


def cmd_diag(args, out) -> int:
    s = load_series(args.input, args.column)
    diag = adequacy_gate(s, args.lags, args.level)
    if not diag.adequate:
        log.warning("WARNING: residual autocorrelation detected (Ljung-Box p=%.4g)", diag.lb_pvalue)
    _write_json({"meta": _meta(args), "diagnostics": diag.to_dict()}, out)
    return 0


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="exactur", description="Exact-MLE unit root tests for AR(1) series.")
    parser.add_argument("--version", action="version", version=f"exactur {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, fmt="json"):
        p.add_argument("--seed", type=int, default=1, help="master seed (default 1)")
        p.add_argument("--threads", type=_threads, default="auto", help="worker count or 'auto'")
        p.add_argument("--format", choices=("json", "csv"), default=fmt)
        p.add_argument("-v", "--verbose", action="store_true")

    def series_input(p):
        p.add_argument("--input", required=True, help="CSV file")
        p.add_argument("--column", default=None, help="column index or header name (default 0)")

    stat_kinds = [s.value for s in Statistic]

    p = sub.add_parser("test", help="exact-MLE unit root test of a series")
    series_input(p)
    p.add_argument("--kind", choices=("mean", "zero"), default="mean")
    p.add_argument("--levels", type=_levels, default=[0.01, 0.05, 0.10], help="percent, e.g. 1,5,10")
    p.add_argument("--surface", help="JSON surface file for critical values")
    p.add_argument("--mc", action="store_true", help="simulate critical values at the series length")
    p.add_argument("--N", type=int, default=20_000)
    p.add_argument("--M", type=int, default=20)
    p.add_argument("--lags", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("mctest", help="Monte-Carlo p-value")
    series_input(p)
    p.add_argument("--kind", choices=stat_kinds, default="taumu")
    p.add_argument("--M", type=int, default=999)
    p.add_argument("--bootstrap", action="store_true", help="resample fitted residuals")
    common(p)
    p.set_defaults(func=cmd_mctest)

    p = sub.add_parser("cv", help="critical values at given lengths")
    p.add_argument("--kind", choices=stat_kinds, default="taumu")
    p.add_argument("--n", type=_ints, required=True)
    p.add_argument("--levels", type=_levels, default=[0.01, 0.05, 0.10])
    p.add_argument("--simulate", action="store_true")
    p.add_argument("--N", type=int, default=20_000)
    p.add_argument("--M", type=int, default=20)
    p.add_argument("--law", type=_law, default=Normal())
    common(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("fit-surface", help="simulate quantiles and fit response surfaces")
    p.add_argument("--kind", choices=stat_kinds, default="taumu")
    p.add_argument("--lengths", type=_ints, default=[25, 50, 100, 200, 400])
    p.add_argument("--N", type=int, default=20_000)
    p.add_argument("--M", type=int, default=20)
    p.add_argument("--alpha", type=_floats, default=[0.01, 0.05, 0.10])
    p.add_argument("--degree", type=int, choices=(2, 3), default=2)
    p.add_argument("--law", type=_law, default=Normal())
    common(p)
    p.set_defaults(func=cmd_fit_surface)

    p = sub.add_parser("simlimit", help="quantiles of the limit distribution")
    p.add_argument("--kind", choices=stat_kinds, default="taumu")
    p.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--alphas", type=_floats, default=[0.01, 0.05, 0.10])
    common(p, fmt="csv")
    p.set_defaults(func=cmd_simlimit)

    p = sub.add_parser("power", help="empirical power table")
    p.add_argument("--grid", choices=("table1", "quick"), default="table1",
                   help="(n, rho) grid; --n/--rho override either axis")
    p.add_argument("--n", type=_ints, default=None)
    p.add_argument("--rho", type=_floats, default=None)
    p.add_argument("--law", type=_law, default=Normal(), help="normal, t, stable, garch or a JSON spec")
    p.add_argument("--tests", type=lambda t: t.split(","), default=list(TESTS))
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--cv-reps", type=int, default=100_000)
    p.add_argument("--start", choices=("stationary", "fixed"), default="stationary")
    common(p, fmt="csv")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("diag", help="residual autocorrelation check")
    series_input(p)
    p.add_argument("--lags", type=int, default=None)
    p.add_argument("--level", type=float, default=0.05)
    common(p)
    p.set_defaults(func=cmd_diag)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        _emit_error("ConfigError", str(exc))
        return 3
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args, out)
    except DATA_ERRORS as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 2
    except UnitRootError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 3


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
