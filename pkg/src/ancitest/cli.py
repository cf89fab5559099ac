"""Command-line front door.

Subcommands wire directly to the library modules; every file-producing run
also writes a JSON manifest (<out>.manifest.json) carrying the subcommand,
the full flag set, the seed, the library version, the wall time and the
output paths, so any artifact can be reproduced from its manifest alone.

Exit codes: 0 success, 2 usage error (argparse), 1 runtime failure; all
diagnostics go to stderr, all data to files or stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .characterization import verify_propositions
from .designs import list_designs
from .power import (
    default_a_grid,
    default_mu_grid,
    render_table,
    reproduce_table,
    toy_power_curve,
    toy_three_obs_powers,
)
from .regression import (
    load_xy_csv,
    make_fixture,
    ols_fit,
    resample_power_study,
    residual_median_analysis,
    residuals,
)

__all__ = ["main"]


def _default_threads() -> int:
    # The environment variable overrides only the default; an explicit
    # --threads flag always wins.
    raw = os.environ.get("ANCITEST_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _non_negative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return value


def _alpha_value(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("alpha must lie strictly between 0 and 1")
    return value


def _nb_list(text):
    if not text.startswith("nb="):
        raise argparse.ArgumentTypeError("expected nb=<int>,<int>,...")
    try:
        values = tuple(int(part) for part in text[3:].split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected nb=<int>,<int>,...") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one resample size")
    return values


def _write_manifest(args, out_paths, started):
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "subcommand": args.subcommand,
        "flags": flags,
        "root_seed": flags.get("seed"),
        "version": __version__,
        "wall_time_s": round(time.perf_counter() - started, 6),
        "output_paths": list(out_paths),
    }
    path = out_paths[0] + ".manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_designs(args):
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["table", "design", "description"])
    for design, description in list_designs():
        writer.writerow([design.table, design.label, description])
    return 0


def _cmd_tables(args):
    started = time.perf_counter()
    report = reproduce_table(
        args.table,
        reps=args.reps,
        seed=args.seed,
        moment_variant=args.moment_variant,
        alpha=args.alpha,
        bootstrap_b=args.bootstrap_b,
        threads=args.threads,
    )
    text = render_table(report, args.format)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    _write_manifest(args, [args.out], started)
    return 0


def _curve_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([f"{v:.10g}" for v in row])
    return buf.getvalue()


def _cmd_toy(args):
    started = time.perf_counter()
    if args.figure == "1a":
        curve = toy_power_curve(default_a_grid(), alpha=args.alpha)
        text = _curve_csv(["a", "power_gain", "covariance"], curve)
    else:
        curve = toy_three_obs_powers(default_mu_grid(), alpha=args.alpha)
        text = _curve_csv(
            ["mu", "p_plain_mean", "p_decorrelated", "p_precision_weighted"], curve
        )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    _write_manifest(args, [args.out], started)
    return 0


def _cmd_verify(args):
    rows = verify_propositions(seed=args.seed, n_models=args.models, n_pairs=args.pairs)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["claim", "status", "max_violation", "cases"])
    for row in rows:
        writer.writerow(
            [
                row["name"],
                "pass" if row["passed"] else "FAIL",
                f"{row['max_violation']:.3e}",
                row["cases"],
            ]
        )
    return 0 if all(row["passed"] for row in rows) else 1


def _analysis_lines(fit, analysis, study, args):
    lines = []
    if fit is not None:
        lines.append(
            "least squares fit: "
            f"intercept={fit.intercept:.4f} (se {fit.se_intercept:.4f}, "
            f"t {fit.t_values[0]:.2f}), "
            f"slope={fit.slope:.4f} (se {fit.se_slope:.4f}, t {fit.t_values[1]:.2f}), "
            f"residual_se={fit.residual_se:.4f}, r_squared={fit.r_squared:.4f}, "
            f"df={fit.df}"
        )
    lines.append(
        f"residual sample: n={analysis.n}, mean={analysis.mean:.6f}, "
        f"variance={analysis.variance:.6f}"
    )
    p = analysis.p_values
    lines.append(
        f"two-sided p-values at alpha={analysis.alpha:g}: "
        f"W={p['W']:.4f} To2={p['To2']:.4f} TN2={p['TN2']:.4f}"
    )
    lines.append("histogram (20 equal-width bins):")
    edges = analysis.histogram_edges
    for i, count in enumerate(analysis.histogram_counts):
        lines.append(f"  [{edges[i]:+.4f}, {edges[i + 1]:+.4f}) {count}")
    if study:
        lines.append(f"resample power study (reps={args.reps}, seed={args.seed}):")
        for n_b, freqs in study:
            lines.append(
                f"  n_b={n_b}: W={freqs['W']:.3f} To2={freqs['To2']:.3f} "
                f"TN2={freqs['TN2']:.3f}"
            )
    return "\n".join(lines) + "\n"


def _cmd_analyze(args):
    started = time.perf_counter()
    fit = None
    if args.zcol is not None:
        y, z = load_xy_csv(args.csv, args.ycol, args.zcol, log_transform=args.log)
        fit = ols_fit(y, z)
        eps = residuals(fit, y, z)
    else:
        # Single-column mode: the named column already holds residuals.
        y, _ = load_xy_csv(args.csv, args.ycol, args.ycol, log_transform=args.log)
        eps = y
    analysis = residual_median_analysis(eps, alpha=args.alpha)
    study = []
    if args.study:
        for n_b in args.study:
            freqs = resample_power_study(
                eps, n_b, reps=args.reps, alpha=args.alpha, seed=args.seed
            )
            study.append((n_b, freqs))
    text = _analysis_lines(fit, analysis, study, args)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _write_manifest(args, [args.out], started)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_fixture(args):
    started = time.perf_counter()
    sample = make_fixture(args.n, args.seed)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["residual"])
    for value in np.asarray(sample):
        writer.writerow([f"{value:.12g}"])
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())
    _write_manifest(args, [args.out], started)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ancitest",
        description="Power studies, finite-model test certification, and the "
        "residual median analysis pipeline.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("designs", help="list registered sampling designs")
    p.set_defaults(func=_cmd_designs)

    p = sub.add_parser("tables", help="reproduce a power table")
    p.add_argument("--table", required=True, choices=["1", "2", "3"])
    p.add_argument("--reps", type=_positive_int, default=55000)
    p.add_argument("--seed", type=_non_negative_int, default=0)
    p.add_argument("--alpha", type=_alpha_value, default=0.05)
    p.add_argument("--moment-variant", choices=["quartic", "quadratic"], default="quartic")
    p.add_argument("--bootstrap-b", type=_positive_int, default=1000)
    p.add_argument("--format", choices=["csv", "markdown"], default="csv")
    p.add_argument("--threads", type=_positive_int, default=_default_threads())
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_tables)

    p = sub.add_parser("toy", help="closed-form toy power curves")
    p.add_argument("--figure", required=True, choices=["1a", "1b"])
    p.add_argument("--alpha", type=_alpha_value, default=0.05)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_toy)

    p = sub.add_parser("verify", help="certify the finite-model test propositions")
    p.add_argument("--seed", type=_non_negative_int, default=20260815)
    p.add_argument("--models", type=_positive_int, default=100)
    p.add_argument("--pairs", type=_positive_int, default=1000)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("analyze", help="regression residual median analysis")
    p.add_argument("--csv", required=True)
    p.add_argument("--ycol", required=True)
    p.add_argument("--zcol", default=None,
                   help="regressor column; omit when --ycol already holds residuals")
    p.add_argument("--log", action="store_true")
    p.add_argument("--alpha", type=_alpha_value, default=0.05)
    p.add_argument("--study", type=_nb_list, default=None, metavar="nb=70,80,90")
    p.add_argument("--reps", type=_positive_int, default=10000)
    p.add_argument("--seed", type=_non_negative_int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("fixture", help="write the synthetic residual fixture")
    p.add_argument("--n", type=_positive_int, default=100)
    p.add_argument("--seed", type=_non_negative_int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fixture)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # argparse handles usage errors with exit 2
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())
