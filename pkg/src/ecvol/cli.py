"""Command-line interface: ``ecvol {returns,fit,profile,compare,simulate}``.

Exit status is 0 on success, 2 for usage or parameter errors, 3 for input
errors, 4 when estimation fails, 5 for comparison errors and 6 for numeric
failures. Errors are reported on stderr as ``error[category]: message``.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from ecvol import __version__
from ecvol.elliptical import Kotz, PearsonVII
from ecvol.errors import EcvolError, EstimationError, InputError, InvalidParameterError
from ecvol.estimate import FitConfig, fit, profile_shape
from ecvol.ingest import load_csv, log_returns, write_series_csv
from ecvol.likelihood import DEPENDENT, INDEPENDENT
from ecvol.meanvol import MeanSpec, VolSpec
from ecvol.report import FitReport, digest_file, dumps, read_report
from ecvol.select import compare_nested
from ecvol.series import PriceSeries
from ecvol.simulate import SimSpec, simulate

EXIT_CODES = {"parameter": 2, "input": 3, "estimation": 4, "comparison": 5, "numeric": 6, "domain": 6}

DEFAULT_THETA = {
    "arch": (0.05, 0.3),
    "garch": (0.05, 0.10, 0.85),
    "tgarch": (0.05, 0.05, 0.85, 0.10),
    "egarch": (-0.1, 0.2, -0.05, 0.95),
}


class UsageError(EcvolError):
    category = "parameter"


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def parse_grid(text: str) -> np.ndarray:
    """``a:b:step`` inclusive of ``b`` (up to rounding), or a comma list."""
    if ":" not in text:
        return np.asarray(_floats(text))
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be a:b:step, got {text!r}")
    try:
        a, b, step = (float(x) for x in parts)
    except ValueError:
        raise UsageError(f"grid must be numeric, got {text!r}") from None
    if step <= 0 or b < a:
        raise UsageError(f"grid needs step > 0 and a <= b, got {text!r}")
    count = int(np.floor((b - a) / step + 1e-9)) + 1
    return np.round(a + step * np.arange(count), 12)


def _add_model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--model", choices=("arch", "garch", "tgarch", "egarch"), default="garch")
    g.add_argument("--p", type=int, default=1, help="ARCH order")
    g.add_argument("--q", type=int, default=None, help="GARCH order (default 1, or 0 for arch)")
    g.add_argument("--k", type=int, default=0, help="number of AR lags in the mean")
    g.add_argument("--law", choices=("kotz", "pearson7"), default="kotz")
    g.add_argument("--dependent", action="store_true", help="joint (dependent-sample) likelihood")
    g.add_argument("--r", type=float, default=None, help="Pearson VII degrees of freedom (default 1)")
    g.add_argument("--shape", type=float, default=None, help="fixed Kotz Q (default 1)")


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="CSV file of returns (or prices with --prices)")
    p.add_argument("--prices", action="store_true", help="input holds prices; convert to returns first")
    p.add_argument("--diff", action="store_true", help="with --prices use p_t - p_{t-1} instead of log returns")
    p.add_argument("--value-column", default=None)
    p.add_argument("--date-column", default=None)


def _add_optimiser_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--multistart", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecvol", description="Volatility models under elliptical laws.")
    parser.add_argument("--version", action="version", version=f"ecvol {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("returns", help="convert a price file to returns")
    p.add_argument("input")
    p.add_argument("--diff", action="store_true", help="raw differences instead of log returns")
    p.add_argument("--value-column", default=None)
    p.add_argument("--date-column", default=None)
    p.add_argument("--out", default=None, help="output CSV (default stdout)")

    p = sub.add_parser("fit", help="fit one model and write a JSON report")
    _add_input_args(p)
    _add_model_args(p)
    p.add_argument("--estimate-shape", action="store_true", help="estimate the Kotz Q jointly")
    _add_optimiser_args(p)
    p.add_argument("--out", default=None, help="output JSON (default stdout)")

    p = sub.add_parser("profile", help="profile log-likelihood over the Kotz Q or Pearson r")
    _add_input_args(p)
    _add_model_args(p)
    p.add_argument("--grid", required=True, help="a:b:step or comma-separated values")
    _add_optimiser_args(p)
    p.add_argument("--out", default=None, help="output JSON (default stdout)")
    p.add_argument("--csv-out", default=None, help="profile curve as CSV")

    p = sub.add_parser("compare", help="compare fit reports against a baseline")
    p.add_argument("reports", nargs="*", help="fit report JSON files")
    p.add_argument("--baseline", required=True, help="baseline fit report")
    p.add_argument("--nested", action="append", default=[], metavar="ID", help="force a model id to count as nested")
    p.add_argument("--non-nested", action="append", default=[], metavar="ID", help="force a model id to count as non-nested")
    p.add_argument("--out", default=None, help="output JSON (default stdout)")

    p = sub.add_parser("simulate", help="simulate a return series to CSV")
    _add_model_args(p)
    p.add_argument("--theta", type=_floats, default=None, help="volatility parameters, comma separated")
    p.add_argument("--beta", type=_floats, default=None, help="mean parameters, comma separated")
    p.add_argument("--n", type=int, default=1000, help="number of returns")
    p.add_argument("--burn", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output CSV (default stdout)")
    return parser


def _vol(args) -> VolSpec:
    if args.model == "arch":
        if args.q not in (None, 0):
            raise UsageError("--q must be 0 (or omitted) for arch")
        return VolSpec.arch(args.p)
    return VolSpec(args.model, args.p, 1 if args.q is None else args.q)


def _law(args):
    if args.law == "kotz":
        if args.r is not None:
            raise UsageError("--r applies to --law pearson7 only")
        return Kotz(Q=1.0 if args.shape is None else args.shape)
    if getattr(args, "estimate_shape", False):
        raise UsageError("--estimate-shape applies to --law kotz only; Pearson VII r is fixed")
    if args.shape is not None:
        raise UsageError("--shape applies to --law kotz only; use --r for Pearson VII")
    return PearsonVII(r=1.0 if args.r is None else args.r)


def _config(args, law) -> FitConfig:
    return FitConfig(
        law=law,
        likelihood=DEPENDENT if args.dependent else INDEPENDENT,
        estimate_shape=getattr(args, "estimate_shape", False),
        multistart=args.multistart,
        seed=args.seed,
    )


def _load_returns(args):
    series = load_csv(args.input, args.value_column, args.date_column, prices=True if args.prices else False)
    if isinstance(series, PriceSeries):
        series = log_returns(series, "diff" if args.diff else "log")
    elif args.diff:
        raise UsageError("--diff needs --prices")
    return series


def _emit(text: str, path, stdout) -> None:
    if path is None:
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_returns(args, stdout) -> None:
    prices = load_csv(args.input, args.value_column, args.date_column, prices=True)
    series = log_returns(prices, "diff" if args.diff else "log")
    write_series_csv(stdout if args.out is None else args.out, series)


def cmd_fit(args, stdout) -> None:
    law = _law(args)
    series = _load_returns(args)
    result = fit(series, MeanSpec(args.k), _vol(args), _config(args, law))
    report = FitReport.from_result(result, digest_file(args.input))
    _emit(report.dumps(), args.out, stdout)


def cmd_profile(args, stdout) -> None:
    law = _law(args)
    if args.law == "kotz" and args.shape is not None:
        raise UsageError("--shape conflicts with --grid for a Kotz profile")
    grid = parse_grid(args.grid)
    if grid.size == 0:
        raise UsageError("empty grid")
    series = _load_returns(args)
    mean, vol = MeanSpec(args.k), _vol(args)
    config = _config(args, law)
    points = profile_shape(series, mean, vol, config, grid)
    shape_name = "Q" if args.law == "kotz" else "r"
    rows = [{shape_name: p.shape, "loglik": p.loglik, "bic_star": p.bic_star, "error": p.error} for p in points]
    ok = [p for p in points if p.error is None]
    best = max(ok, key=lambda p: p.loglik) if ok else None
    doc = {
        "schema_version": 1,
        "tool": "ecvol",
        "version": __version__,
        "input": digest_file(args.input),
        "model": {
            "mean": mean.to_dict(),
            "volatility": vol.to_dict(),
            "law": law.to_dict(),
            "likelihood": config.likelihood,
        },
        "shape": shape_name,
        "points": rows,
        "best": None if best is None else {shape_name: best.shape, "loglik": best.loglik, "bic_star": best.bic_star},
    }
    _emit(dumps(doc), args.out, stdout)
    if args.csv_out is not None:
        with open(args.csv_out, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([shape_name, "loglik", "bic_star"])
            for p in points:
                w.writerow([repr(p.shape), repr(float(p.loglik)), repr(float(p.bic_star))])
    if best is None:
        raise EstimationError("every profile point failed")


def cmd_compare(args, stdout) -> None:
    base = read_report(args.baseline)
    reports = {base.model_id: base}
    for path in args.reports:
        rep = read_report(path)
        if rep.model_id in reports and path != args.baseline:
            if reports[rep.model_id].to_dict() != rep.to_dict():
                raise InputError(f"two different reports share model id {rep.model_id!r}")
            continue
        reports[rep.model_id] = rep
    both = set(args.nested) & set(args.non_nested)
    if both:
        raise UsageError(f"ids given as both nested and non-nested: {sorted(both)}")
    nesting = {i: True for i in args.nested} | {i: False for i in args.non_nested}
    comparison = compare_nested(list(reports.values()), base.model_id, nesting)
    _emit(dumps({"schema_version": 1, "tool": "ecvol", "version": __version__, "comparison": comparison.to_dict()}), args.out, stdout)


def cmd_simulate(args, stdout) -> None:
    vol = _vol(args)
    law = _law(args)
    if args.law == "kotz" and not law.is_gaussian:
        raise UsageError("only the Gaussian Kotz law (Q=1) can be simulated")
    theta = args.theta if args.theta is not None else DEFAULT_THETA[vol.family]
    if args.theta is None and (vol.p, vol.q) != ((1, 0) if vol.family == "arch" else (1, 1)):
        raise UsageError("--theta is required for orders other than the (1) / (1,1) defaults")
    mean = MeanSpec(args.k)
    beta = args.beta if args.beta is not None else (0.0,) * mean.n_params
    spec = SimSpec(
        T=args.n, vol=vol, theta=theta, mean=mean, beta=beta, law=law,
        dependent=args.dependent, seed=args.seed, burn=args.burn,
    )
    series = simulate(spec)
    write_series_csv(stdout if args.out is None else args.out, series)


COMMANDS = {
    "returns": cmd_returns,
    "fit": cmd_fit,
    "profile": cmd_profile,
    "compare": cmd_compare,
    "simulate": cmd_simulate,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args, stdout)
    except EcvolError as exc:
        stderr.write(f"error[{exc.category}]: {exc}\n")
        return EXIT_CODES.get(exc.category, 1)
    except (InvalidParameterError, ValueError) as exc:
        stderr.write(f"error[parameter]: {exc}\n")
        return 2
    except OSError as exc:
        stderr.write(f"error[input]: {exc}\n")
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
