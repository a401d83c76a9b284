"""Confidence regions for ``beta``: the normal-approximation (NA) ellipsoid and
the empirical-likelihood (EL) region calibrated by a Monte Carlo weighted
chi-square quantile.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bspline import BSplineBasis
from .el import el_statistic
from .exceptions import DegenerateFitError, DimensionError, DomainError
from .numerics import chi2_quantile, make_rng, spd_solve, sqrt_spd, sym_eig
from .pflr import Dataset, PFLRFit, fit

DEFAULT_MC_DRAWS = 20_000
NA, EL = "NA", "EL"


def sigma0_weights(Sigma_hat, Sigma1_hat) -> np.ndarray:
    """Eigenvalues of ``Sigma^{1/2} Sigma1^{-1} Sigma^{1/2}``, descending, clamped at zero.

    These are the weights of the chi-square(1) components in the limit law
    of the EL statistic at the true parameter.
    """
    root = sqrt_spd(Sigma_hat)
    inner = root @ spd_solve(Sigma1_hat, root, name="Sigma1_hat")
    vals, _ = sym_eig((inner + inner.T) / 2)
    if vals[-1] < -1e-10 * max(vals[0], 1.0):
        raise DomainError(f"negative limit weight {vals[-1]:.3g}")
    return np.clip(vals, 0.0, None)


def weighted_chisq_draws(weights, mc_draws, seed) -> np.ndarray:
    """``mc_draws`` realisations of ``sum_j weights_j * U_j^2`` with ``U`` standard normal."""
    w = np.asarray(weights, dtype=float).ravel()
    if w.size == 0:
        raise DomainError("weights must be non-empty")
    U = make_rng(seed).standard_normal((int(mc_draws), w.size))
    return (U * U) @ w


def mc_quantile(draws, prob) -> float:
    """Order statistic of index ``ceil(len(draws) * prob)`` (1-based)."""
    if not 0.0 < prob < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {prob}")
    m = len(draws)
    idx = max(math.ceil(m * prob), 1) - 1
    return float(np.partition(draws, idx)[idx])


def weighted_chisq_quantile(weights, prob, mc_draws=DEFAULT_MC_DRAWS, seed=0) -> float:
    """Monte Carlo ``prob``-quantile of a weighted sum of independent chi-square(1) variables."""
    if mc_draws < 1000:
        raise DomainError("mc_draws must be at least 1000")
    return mc_quantile(weighted_chisq_draws(weights, mc_draws, seed), prob)


def na_statistic(fit_: PFLRFit, beta) -> float:
    """Wald statistic ``(n / sigma2_hat) (beta_hat - beta)^T Sigma_hat (beta_hat - beta)``.

    ``Sigma_hat = Z^T (I - A) Z / n``, so this is the quadratic form in the
    inverse of the estimated covariance ``sigma2_hat * Sigma_hat^{-1} / n``
    of ``beta_hat``.
    """
    beta = np.asarray(beta, dtype=float).ravel()
    if beta.shape != fit_.beta_hat.shape:
        raise DimensionError(f"beta has {beta.size} entries, expected {fit_.p}")
    if not fit_.sigma2_hat > 0:
        raise DegenerateFitError("sigma2_hat is zero; the NA statistic is undefined")
    d = fit_.beta_hat - beta
    return float(fit_.n / fit_.sigma2_hat * d @ fit_.Sigma_hat @ d)


@dataclass(frozen=True)
class RegionVerdict:
    method: str
    gamma: float
    contained: bool
    statistic: float
    critical_value: float
    weights: Optional[np.ndarray] = None
    hull_ok: bool = True


def region_contains(data: Dataset, basis: BSplineBasis, beta, gamma: float, method: str,
                    mc_draws: int = DEFAULT_MC_DRAWS, seed: int = 0,
                    fit_: Optional[PFLRFit] = None) -> RegionVerdict:
    """Decide whether ``beta`` lies in the ``1 - gamma`` NA or EL confidence region.

    A hull failure in the EL computation gives an infinite statistic and
    therefore ``contained = False``.
    """
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    method = method.upper()
    if fit_ is None:
        fit_ = fit(data, basis)
    if method == NA:
        stat = na_statistic(fit_, beta)
        crit = chi2_quantile(1.0 - gamma, fit_.p)
        return RegionVerdict(NA, gamma, stat <= crit, stat, crit)
    if method == EL:
        ev = el_statistic(data, basis, beta)
        w = sigma0_weights(fit_.Sigma_hat, fit_.Sigma1_hat)
        crit = weighted_chisq_quantile(w, 1.0 - gamma, mc_draws, seed)
        return RegionVerdict(EL, gamma, bool(ev.hull_ok and ev.statistic <= crit),
                             ev.statistic, crit, w, ev.hull_ok)
    raise DomainError(f"unknown method {method!r}; expected 'NA' or 'EL'")
