"""Monte Carlo coverage study of the NA and EL confidence regions.

Every replication owns a random stream keyed by ``(master_seed, model, n,
error, replication)``.  All gammas and both methods are evaluated on the
same simulated dataset, and the report is a pure function of the
configuration, whatever the number of worker processes.
"""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .bspline import make_basis
from .el import el_statistic
from .exceptions import PFLRError
from .inference import EL, NA, mc_quantile, na_statistic, sigma0_weights, weighted_chisq_draws
from .numerics import Grid, chi2_quantile, derive_seed, make_rng
from .pflr import fit, select_knots
from .simgen import ERROR_KINDS, ModelSpec, gen_dataset

REPORT_HEADER = ["model", "n", "gamma", "error", "method", "coverage", "reps",
                 "hull_failures", "failures", "elapsed_ms"]
ERROR_LABEL = {"normal": "normal", "skew_normal": "skew"}
METHODS = (EL, NA)


@dataclass(frozen=True)
class CoverageConfig:
    models: Sequence[int] = (1, 2, 3)
    ns: Sequence[int] = (30, 50, 80, 150)
    gammas: Sequence[float] = (0.10, 0.05)
    errors: Sequence[str] = ERROR_KINDS
    reps: int = 1000
    degree: int = 2
    knots: Optional[int] = None  # None selects by leave-one-out CV in every replication
    mc_draws: int = 20_000
    seed: int = 20240101
    threads: int = 1
    grid_points: int = 101
    timing: bool = False
    model1_error_sd: Optional[float] = None

    def cells(self):
        return list(product(self.models, self.ns, self.errors))


@dataclass
class Replicate:
    """Outcome of one replication, for every gamma (in config order)."""

    na: list = field(default_factory=list)
    el: list = field(default_factory=list)
    hull_ok: bool = True
    failed: bool = False
    knots: int = -1
    el_stat: float = float("nan")
    na_stat: float = float("nan")


def replication_key(model, n, error, r):
    return (int(model), int(n), ERROR_KINDS.index(error), int(r))


def run_replication(cfg: CoverageConfig, model: int, n: int, error: str, r: int) -> Replicate:
    key = replication_key(model, n, error, r)
    rng = make_rng(cfg.seed, *key)
    err_sd = cfg.model1_error_sd if model == 1 and error == "normal" else None
    spec = ModelSpec(model, n, error, Grid.uniform(cfg.grid_points), error_sd=err_sd)
    data, truth = gen_dataset(spec, rng)
    out = Replicate()
    try:
        knots = cfg.knots if cfg.knots is not None else select_knots(data, cfg.degree)
        basis = make_basis(cfg.degree, knots)
        f = fit(data, basis)
        out.knots = knots
        out.na_stat = na_statistic(f, truth.beta)
        ev = el_statistic(data, basis, truth.beta)
        out.el_stat = ev.statistic
        out.hull_ok = ev.hull_ok
        w = sigma0_weights(f.Sigma_hat, f.Sigma1_hat)
        draws = weighted_chisq_draws(w, cfg.mc_draws, derive_seed(cfg.seed, *key, 1))
    except PFLRError:
        out.failed = True
        out.na = [False] * len(cfg.gammas)
        out.el = [False] * len(cfg.gammas)
        return out
    for g in cfg.gammas:
        out.na.append(bool(out.na_stat <= chi2_quantile(1.0 - g, data.p)))
        out.el.append(bool(ev.hull_ok and out.el_stat <= mc_quantile(draws, 1.0 - g)))
    return out


def _run_cell(args):
    cfg, model, n, error = args
    t0 = time.perf_counter()
    reps = [run_replication(cfg, model, n, error, r) for r in range(cfg.reps)]
    return reps, (time.perf_counter() - t0) * 1000.0


def _run_chunk(args):
    cfg, model, n, error, lo, hi = args
    return [run_replication(cfg, model, n, error, r) for r in range(lo, hi)]


def run_study(cfg: CoverageConfig, progress=None):
    """Run every cell and return report rows (list of dicts) in a fixed order.

    ``progress`` is an optional callable receiving ``(done_cells, total_cells)``.
    """
    cells = cfg.cells()
    results = {}
    elapsed = {}
    if cfg.threads <= 1:
        for i, (model, n, error) in enumerate(cells):
            results[model, n, error], elapsed[model, n, error] = _run_cell((cfg, model, n, error))
            if progress:
                progress(i + 1, len(cells))
    else:
        chunk = max(1, min(50, cfg.reps // cfg.threads or 1))
        tasks = [(cfg, m, n, e, lo, min(lo + chunk, cfg.reps))
                 for (m, n, e) in cells for lo in range(0, cfg.reps, chunk)]
        t0 = time.perf_counter()
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            for task, reps in zip(tasks, pool.map(_run_chunk, tasks)):
                results.setdefault(task[1:4], []).extend(reps)
        # wall time is shared by all cells when they run interleaved
        per_cell = (time.perf_counter() - t0) * 1000.0 / len(cells)
        elapsed = {c: per_cell for c in cells}
    return summarize(cfg, results, elapsed)


def summarize(cfg, results, elapsed):
    rows = []
    for model, n, error in cfg.cells():
        reps = results[model, n, error]
        hull_failures = sum(1 for r in reps if not r.failed and not r.hull_ok)
        failures = sum(1 for r in reps if r.failed)
        for gi, g in enumerate(cfg.gammas):
            for method in METHODS:
                hits = sum(1 for r in reps if (r.el if method == EL else r.na)[gi])
                rows.append({
                    "model": model, "n": n, "gamma": g, "error": ERROR_LABEL[error],
                    "method": method, "coverage": hits / len(reps), "reps": len(reps),
                    "hull_failures": hull_failures if method == EL else 0,
                    "failures": failures,
                    "elapsed_ms": int(round(elapsed[model, n, error])) if cfg.timing else 0,
                })
    return rows


def format_report(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_HEADER, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({**row, "gamma": f"{row['gamma']:g}",
                         "coverage": f"{row['coverage']:.4f}"})
    return buf.getvalue()


def coverage_lookup(rows):
    """Map ``(model, n, gamma, error, method) -> coverage``."""
    return {(r["model"], r["n"], r["gamma"], r["error"], r["method"]): r["coverage"]
            for r in rows}


def el_statistics_at_truth(model, n, reps, seed, error="normal", degree=2, knots=None,
                           grid_points=101):
    """EL statistics at the true beta and fitted limit weights over ``reps`` datasets."""
    stats, weights = [], []
    for r in range(reps):
        rng = make_rng(seed, *replication_key(model, n, error, r))
        data, truth = gen_dataset(ModelSpec(model, n, error, Grid.uniform(grid_points)), rng)
        k = knots if knots is not None else select_knots(data, degree)
        basis = make_basis(degree, k)
        f = fit(data, basis)
        stats.append(el_statistic(data, basis, truth.beta).statistic)
        weights.append(sigma0_weights(f.Sigma_hat, f.Sigma1_hat))
    return np.asarray(stats), np.asarray(weights)
