"""Command-line front end.

Subcommands: ``test`` (run the randomized significance test on a CSV),
``simulate`` (execute an experiment plan), ``power`` (empirical power
curve for a named scenario), ``theory`` (closed-form tuning/power curves)
and ``presets`` (list the bundled scenarios). Every failure path exits
nonzero with a single machine-parsable ``ERROR:<Code>:`` line on stderr.
"""

import argparse
import csv
import json
import sys
from dataclasses import replace

import numpy as np

from ._version import __version__
from .dgp import PRESET_NAMES, preset
from .errors import (
    ColumnMissing,
    InvalidGrid,
    SplitwaldError,
    TooFewRows,
)
from .experiments import export_report, load_plan, run_plan
from .randomization import SeedSpec
from .regression import RegressionData, Restriction
from .teststats import StatisticConfig, TestMode, power_curve_empirical, run_test
from .theory import asymptotic_power, elasticity, f_p0, g_p0

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_FLAGGED = 3


def _parse_seed(text):
    # decimal or hex (0x...) 64-bit
    return int(text, 0)


def _parse_grid(text):
    """Parse ``lo:hi:step`` (inclusive within rounding) or a single value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) == 3:
            lo, hi, step = (float(p) for p in parts)
        else:
            raise ValueError("expected VALUE or LO:HI:STEP")
    except ValueError as exc:
        raise InvalidGrid(f"bad grid {text!r}: {exc}") from None
    if step <= 0 or hi < lo:
        raise InvalidGrid(f"bad grid {text!r}: need step > 0 and hi >= lo")
    count = int(round((hi - lo) / step)) + 1
    values = [lo + i * step for i in range(count)]
    return [v for v in values if v <= hi + 1e-12]


def _read_csv(path, y_col, x_cols):
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except FileNotFoundError:
        raise SplitwaldError(f"input file not found: {path}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TooFewRows(f"{path}: empty file") from None
        for col in [y_col, *x_cols]:
            if col not in header:
                raise ColumnMissing(f"{path}: column {col!r} not in header {header}")
        idx = {col: header.index(col) for col in [y_col, *x_cols]}
        rows = []
        for lineno, row in enumerate(reader, start=2):
            values = []
            for col in [y_col, *x_cols]:
                cell = row[idx[col]].strip() if idx[col] < len(row) else ""
                if cell == "":
                    raise SplitwaldError(
                        f"{path}: line {lineno}: missing value in column {col!r} "
                        "(missing data is an error, not imputed)"
                    )
                try:
                    values.append(float(cell))
                except ValueError:
                    raise SplitwaldError(
                        f"{path}: line {lineno}: non-numeric value {cell!r} "
                        f"in column {col!r}"
                    ) from None
            rows.append(values)
    arr = np.asarray(rows, dtype=np.float64)
    return arr[:, 0], arr[:, 1:]


def _statistic_config(args):
    if args.m is not None and args.mn_delta is not None:
        raise SplitwaldError("--m and --mn-delta are mutually exclusive")
    if args.mn_delta is not None:
        return StatisticConfig(
            p0=args.p0,
            mode=TestMode.GROWING_M_NORMAL,
            mn_delta=args.mn_delta,
            alpha=args.alpha,
        )
    return StatisticConfig(
        p0=args.p0,
        mode=TestMode.FIXED_M_CHI_SQUARE,
        m=args.m if args.m is not None else 5,
        alpha=args.alpha,
    )


def _cmd_test(args):
    x_cols = [c.strip() for c in args.x.split(",") if c.strip()]
    if not x_cols:
        raise SplitwaldError("--x needs at least one predictor column")
    y_raw, x_raw = _read_csv(args.data, args.y, x_cols)

    # The file holds raw (y_t, x_t) rows in time order; the one-period lag
    # happens here so users never pre-lag (and never double-lag).
    y = y_raw[1:]
    X_lagged = x_raw[:-1]
    p = len(x_cols)
    if y.shape[0] < p + 3:
        raise TooFewRows(
            f"need at least {p + 3} usable rows after lagging, got {y.shape[0]}"
        )

    if args.restrict == "all":
        restriction = Restriction.all_slopes(p)
    else:
        names = [c.strip() for c in args.restrict.split(",") if c.strip()]
        indices = []
        for name in names:
            if name not in x_cols:
                raise ColumnMissing(
                    f"--restrict names {name!r}, which is not a predictor column"
                )
            indices.append(x_cols.index(name))
        restriction = Restriction.subset(indices, p)

    cfg = _statistic_config(args)
    data = RegressionData(y, X_lagged)
    outcome = run_test(data, restriction, cfg, SeedSpec(args.seed))

    decision = "reject H0" if outcome.reject else "fail to reject H0"
    print(f"S_M      = {outcome.s_m:.6f}")
    print(f"Q        = {outcome.q:.6f}")
    print(f"M        = {outcome.df_or_mn}")
    print(f"p0       = {cfg.p0}")
    print(f"mode     = {outcome.mode.value}")
    print(f"p-value  = {outcome.p_value:.6g}")
    print(f"decision = {decision} at level {cfg.alpha}")
    print(f"seed     = {outcome.seed.describe()}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(outcome.as_dict(), fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def _cmd_simulate(args):
    plan = load_plan(args.plan, workers=args.workers)
    if args.replications is not None:
        plan = replace(plan, replications=args.replications)

    def progress(done, total):
        print(f"simulate: chunk {done}/{total}", file=sys.stderr)

    report = run_plan(plan, progress=progress)
    payload = export_report(report, args.format)
    with open(args.out, "wb") as fh:
        fh.write(payload)
    print(f"simulate: wrote {args.out}", file=sys.stderr)
    if report.flagged:
        print(
            "ERROR:ExcessDegeneracies: one or more cells exceeded the "
            "degenerate-replication limit",
            file=sys.stderr,
        )
        return EXIT_FLAGGED
    return EXIT_OK


def _cmd_power(args):
    spec = preset(
        args.preset,
        args.n,
        alpha1=args.alpha1,
        sigma_uv=args.sigma_uv,
        phi0=args.phi0,
    )
    cfg = _statistic_config(args)
    betas = sorted(_parse_grid(args.beta_grid))
    points = power_curve_empirical(
        spec,
        betas,
        cfg,
        reps=args.reps,
        seed=SeedSpec(args.seed),
        workers=args.workers,
    )
    lines = ["beta,rejection_rate,mc_se"]
    for pt in points:
        lines.append(
            f"{pt['beta']:.6g},{pt['rejection_rate']:.6g},{pt['mc_se']:.6g}"
        )
    _write_lines(args.out, lines)
    return EXIT_OK


def _cmd_theory(args):
    if args.curve in ("f", "g", "elasticity"):
        grid = _parse_grid(args.grid if args.grid else "0.05:0.95:0.01")
        fn = {"f": f_p0, "g": g_p0, "elasticity": elasticity}[args.curve]
        lines = [f"p0,{args.curve}"]
        for p0 in grid:
            lines.append(f"{p0:.6g},{fn(p0):.6g}")
    elif args.curve == "power_vs_m":
        if args.lam < 0:
            raise InvalidGrid(f"--lam must be >= 0, got {args.lam}")
        if args.m_max < 1:
            raise InvalidGrid(f"--m-max must be >= 1, got {args.m_max}")
        lines = ["m,power"]
        for m in range(1, args.m_max + 1):
            lines.append(f"{m},{asymptotic_power(m * args.lam, m, args.alpha):.6g}")
    else:  # pragma: no cover - argparse enforces choices
        raise InvalidGrid(f"unknown curve {args.curve!r}")
    _write_lines(args.out, lines)
    return EXIT_OK


def _cmd_presets(args):
    del args
    for name in PRESET_NAMES:
        if name.startswith("DGP1"):
            spec = preset(name, 250, alpha1=1.0)
            extras = "alpha1 and sigma_uv selectable; p=1"
        else:
            spec = preset(name, 250)
            extras = f"alphas={tuple(spec.alpha.tolist())}; p=3"
        print(
            f"{name}: rho={spec.rho}, theta0={spec.theta0}, theta1={spec.theta1}; "
            f"{extras}"
        )
    return EXIT_OK


def _write_lines(out, lines):
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="splitwald",
        description="Randomized split-sample significance tests for predictive regressions.",
    )
    parser.add_argument(
        "--version", action="version", version=f"splitwald {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_statistic_flags(p):
        p.add_argument("--p0", type=float, default=0.40, help="tuning probability")
        p.add_argument("--m", type=int, default=None, help="explicit draw count")
        p.add_argument(
            "--mn-delta",
            type=float,
            default=None,
            dest="mn_delta",
            help="growth exponent for M_n = floor((n/p0)^delta)",
        )
        p.add_argument("--alpha", type=float, default=0.10, help="nominal level")

    t = sub.add_parser("test", help="run the test on a CSV of raw (y_t, x_t) columns")
    t.add_argument("data", help="CSV file with a header, comma separator, '.' decimal")
    t.add_argument("--y", required=True, help="predictand column name")
    t.add_argument("--x", required=True, help="comma list of predictor column names")
    t.add_argument(
        "--restrict",
        default="all",
        help="'all' (global null) or comma list of predictor names to restrict to zero",
    )
    add_statistic_flags(t)
    t.add_argument("--seed", type=_parse_seed, default=0, help="decimal or hex seed")
    t.add_argument("--out", default=None, help="write the outcome as JSON here")
    t.set_defaults(func=_cmd_test)

    s = sub.add_parser("simulate", help="run an experiment plan file")
    s.add_argument("plan", help="JSON plan file (see README for the schema)")
    s.add_argument("--out", required=True, help="report output path")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--workers", type=int, default=None, help="override plan workers")
    s.add_argument(
        "--replications", type=int, default=None, help="override plan replications"
    )
    s.set_defaults(func=_cmd_simulate)

    w = sub.add_parser("power", help="empirical power curve for a preset scenario")
    w.add_argument("--preset", required=True, choices=PRESET_NAMES)
    w.add_argument("--n", type=int, required=True, help="sample size")
    w.add_argument("--alpha1", type=float, default=None, help="persistence exponent")
    w.add_argument("--sigma-uv", type=float, default=None, dest="sigma_uv")
    w.add_argument("--phi0", type=float, default=0.0)
    w.add_argument("--beta-grid", default="0:0.25:0.01", dest="beta_grid")
    add_statistic_flags(w)
    w.add_argument("--reps", type=int, default=2000)
    w.add_argument("--seed", type=_parse_seed, default=0)
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("--out", default=None, help="CSV output path (stdout if omitted)")
    w.set_defaults(func=_cmd_power)

    th = sub.add_parser("theory", help="emit closed-form tuning/power curves as CSV")
    th.add_argument(
        "--curve", required=True, choices=("f", "g", "elasticity", "power_vs_m")
    )
    th.add_argument("--grid", default=None, help="p0 grid as LO:HI:STEP or VALUE")
    th.add_argument("--lam", type=float, default=2.0, help="per-draw noncentrality")
    th.add_argument("--m-max", type=int, default=30, dest="m_max")
    th.add_argument("--alpha", type=float, default=0.10)
    th.add_argument("--out", default=None, help="CSV output path (stdout if omitted)")
    th.set_defaults(func=_cmd_theory)

    pr = sub.add_parser("presets", help="list the bundled scenario presets")
    pr.set_defaults(func=_cmd_presets)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SplitwaldError as exc:
        print(f"ERROR:{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"ERROR:{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
