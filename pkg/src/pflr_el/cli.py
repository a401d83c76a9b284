"""Command-line interface: ``simulate``, ``fit``, ``region`` and ``coverage``.

Exit codes: 0 success, 2 usage or configuration error, 3 data or I/O error,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .bspline import make_basis
from .dataio import format_dataset, read_dataset
from .exceptions import (ConfigurationError, DataFormatError, DegenerateFitError, DimensionError,
                         DomainError, InputError, NotPSDError, SingularMatrixError)
from .inference import DEFAULT_MC_DRAWS, region_contains
from .numerics import Grid, make_rng
from .pflr import alpha_hat, fit, select_knots
from .simgen import ModelSpec, NORMAL, SKEW, gen_dataset
from .study import CoverageConfig, format_report, run_study

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

ERROR_ALIASES = {"normal": NORMAL, "skew": SKEW, "skew_normal": SKEW}

# config-file keys, mapped onto argparse destinations
CONFIG_KEYS = {"model", "n", "reps", "gamma", "error", "degree", "knots", "mc_draws",
               "seed", "threads", "out", "grid_points", "timing", "model1_error_sd"}


class UsageError(Exception):
    pass


def _int_list(text):
    return [int(v) for v in str(text).split(",") if v.strip()]


def _float_list(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def _error_list(text):
    out = []
    for v in str(text).split(","):
        v = v.strip()
        if v == "both":
            out.extend([NORMAL, SKEW])
        elif v in ERROR_ALIASES:
            out.append(ERROR_ALIASES[v])
        else:
            raise UsageError(f"unknown error kind {v!r}; use normal, skew or both")
    return out


def parse_knots(text):
    """``"auto"`` -> None, ``"fixed:N"`` -> N."""
    text = str(text).strip()
    if text == "auto":
        return None
    if text.startswith("fixed:"):
        try:
            n = int(text[len("fixed:"):])
        except ValueError:
            n = -1
        if n >= 0:
            return n
    raise UsageError(f"--knots must be 'auto' or 'fixed:N', got {text!r}")


def _choose_basis(data, degree, knots_text):
    knots = parse_knots(knots_text)
    if knots is None:
        knots = select_knots(data, degree)
    return make_basis(degree, knots)


def _write_text(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_simulate(args):
    error = ERROR_ALIASES[args.error]
    spec = ModelSpec(args.model, args.n, error, Grid.uniform(args.grid_points))
    data, _ = gen_dataset(spec, make_rng(args.seed))
    _write_text(format_dataset(data), args.out)
    return EXIT_OK


def cmd_fit(args):
    data = read_dataset(args.data)
    basis = _choose_basis(data, args.degree, args.knots)
    f = fit(data, basis)
    grid = data.X.grid.points
    alpha = alpha_hat(f, grid)
    print(f"n = {data.n}, p = {data.p}")
    print(f"interior knots N_n = {basis.interior_knots}, degree = {basis.degree}, "
          f"k_n = {basis.dimension}")
    print("beta_hat = " + ", ".join(f"{v:.10g}" for v in f.beta_hat))
    print(f"sigma2_hat = {f.sigma2_hat:.10g}")
    print("alpha_hat on grid:")
    for t, a in zip(grid, alpha):
        print(f"  {t:.6g}\t{a:.10g}")
    if args.json:
        summary = {
            "n": data.n, "p": data.p, "degree": basis.degree,
            "interior_knots": basis.interior_knots, "k_n": basis.dimension,
            "beta_hat": f.beta_hat.tolist(), "b_hat": f.b_hat.tolist(),
            "sigma2_hat": f.sigma2_hat,
            "Sigma_hat": f.Sigma_hat.tolist(), "Sigma1_hat": f.Sigma1_hat.tolist(),
            "grid": grid.tolist(), "alpha_hat": alpha.tolist(),
        }
        _write_text(json.dumps(summary, indent=2) + "\n", args.json)
    return EXIT_OK


def cmd_region(args):
    data = read_dataset(args.data)
    beta = np.array(_float_list(args.beta))
    if beta.size != data.p:
        raise UsageError(f"--beta has {beta.size} entries but the data have p = {data.p}")
    basis = _choose_basis(data, args.degree, args.knots)
    v = region_contains(data, basis, beta, args.gamma, args.method,
                        mc_draws=args.mc_draws, seed=args.seed)
    print(f"method = {v.method}, gamma = {v.gamma:g}, k_n = {basis.dimension}")
    print(f"statistic = {v.statistic:.10g}")
    print(f"critical value = {v.critical_value:.10g}")
    if v.method == "EL":
        print("weights = " + ", ".join(f"{w:.10g}" for w in v.weights))
        print(f"hull = {'ok' if v.hull_ok else 'failure'}")
    if v.contained:
        verdict = "contained"
    elif not v.hull_ok:
        verdict = "not contained (hull failure)"
    else:
        verdict = "not contained"
    print(f"verdict: {verdict}")
    return EXIT_OK


def cmd_coverage(args):
    models = _int_list(args.model)
    if any(m not in (1, 2, 3) for m in models):
        raise UsageError("--model values must be 1, 2 or 3")
    gammas = _float_list(args.gamma)
    if not gammas or any(not 0 < g < 1 for g in gammas):
        raise UsageError("--gamma values must lie in (0, 1)")
    ns = _int_list(args.n)
    if not ns:
        raise UsageError("--n must list at least one sample size")
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    if args.model1_error_sd is not None and not args.model1_error_sd > 0:
        raise UsageError("--model1-error-sd must be positive")
    cfg = CoverageConfig(
        models=tuple(models), ns=tuple(ns), gammas=tuple(gammas),
        errors=tuple(_error_list(args.error)), reps=args.reps, degree=args.degree,
        knots=parse_knots(args.knots), mc_draws=args.mc_draws, seed=args.seed,
        threads=max(1, args.threads), grid_points=args.grid_points, timing=args.timing,
        model1_error_sd=args.model1_error_sd,
    )

    def progress(done, total):
        print(f"[coverage] {done}/{total} cells", file=sys.stderr)

    rows = run_study(cfg, progress=progress if args.verbose else None)
    _write_text(format_report(rows), args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pflr-el",
        description="Partial functional linear regression with EL and NA confidence regions.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    parser.commands = sub.choices

    p = sub.add_parser("simulate", help="simulate one dataset and write it as CSV")
    p.add_argument("--model", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--error", choices=sorted(ERROR_ALIASES), default="normal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-points", type=int, default=101)
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=cmd_simulate)

    def add_basis_opts(q):
        q.add_argument("--degree", type=int, default=2)
        q.add_argument("--knots", default="auto", help="'auto' (leave-one-out CV) or 'fixed:N'")

    p = sub.add_parser("fit", help="fit the model to a dataset CSV")
    p.add_argument("data")
    add_basis_opts(p)
    p.add_argument("--json", default=None, help="also write a JSON summary to this path")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("region", help="test whether beta lies in a confidence region")
    p.add_argument("data")
    p.add_argument("--beta", required=True, help="comma separated, e.g. 5,-1.7")
    p.add_argument("--gamma", type=float, default=0.05)
    p.add_argument("--method", type=str.upper, choices=("NA", "EL"), default="EL")
    add_basis_opts(p)
    p.add_argument("--mc-draws", type=int, default=DEFAULT_MC_DRAWS)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("coverage", help="run the Monte Carlo coverage study")
    p.add_argument("--config", default=None, help="JSON file of defaults; flags override")
    p.add_argument("--model", default="1,2,3")
    p.add_argument("--n", default="30,50,80,150")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--gamma", default="0.1,0.05")
    p.add_argument("--error", default="both", help="normal, skew or both (comma list allowed)")
    add_basis_opts(p)
    p.add_argument("--mc-draws", type=int, default=DEFAULT_MC_DRAWS)
    p.add_argument("--seed", type=int, default=20240101)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--grid-points", type=int, default=101)
    p.add_argument("--model1-error-sd", type=float, default=None,
                   help="normal-error sd for Model 1 (default 0.6, i.e. N(0, 0.36) read as a variance)")
    p.add_argument("--timing", action="store_true",
                   help="record wall time in elapsed_ms (makes the report non-reproducible)")
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.set_defaults(func=cmd_coverage)
    return parser


def _apply_config(parser, argv):
    """Re-parse with defaults taken from ``--config`` so explicit flags still win."""
    args = parser.parse_args(argv)
    if getattr(args, "config", None) is None:
        return args
    with open(args.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    defaults = {}
    for key, val in cfg.items():
        if isinstance(val, list):
            val = ",".join(str(v) for v in val)
        defaults[key] = val
    parser.commands[args.command].set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None):
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except (UsageError, ConfigurationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataFormatError, DimensionError, InputError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SingularMatrixError, NotPSDError, DegenerateFitError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
