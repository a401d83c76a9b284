"""Empirical likelihood for the regression parameters.

The scores are ``W_i(beta) = Z_i * [(I - A)(Y - Z beta)]_i`` and the EL ratio
is computed through its convex dual in the Lagrange multiplier, using Owen's
pseudo-logarithm so the dual is finite everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bspline import BSplineBasis, functional_design
from .exceptions import DimensionError, InputError
from .pflr import Dataset, smoother_coefficients

GRAD_TOL = 1e-10
# |sum(pi) - 1| above this means lam ran off to infinity (origin outside the hull)
NORMALIZATION_TOL = 1e-6
MAX_NEWTON = 50
MAX_HALVINGS = 60


@dataclass(frozen=True, eq=False)
class ELEvaluation:
    lam: np.ndarray
    pi: np.ndarray
    statistic: float  # -2 log R_n(beta); inf when the origin is not inside the score hull
    converged: bool
    iterations: int
    hull_ok: bool


def scores(data: Dataset, basis: BSplineBasis, beta) -> np.ndarray:
    """Score matrix with row ``i`` equal to ``W_i(beta)``."""
    beta = np.asarray(beta, dtype=float).ravel()
    if beta.size != data.p:
        raise DimensionError(f"beta has {beta.size} entries, expected {data.p}")
    B = functional_design(basis, data.X)
    r = data.Y - data.Z @ beta
    e = r - B @ (smoother_coefficients(B) @ r)
    return data.Z * e[:, None]


def _log_star(z, n):
    """Pseudo-logarithm and its first two derivatives (quadratic below ``1/n``)."""
    eps = 1.0 / n
    low = z < eps
    zc = np.where(low, eps, z)
    f = np.where(low, np.log(eps) - 1.5 + 2.0 * z / eps - 0.5 * (z / eps) ** 2, np.log(zc))
    d1 = np.where(low, 2.0 / eps - z / eps ** 2, 1.0 / zc)
    d2 = np.where(low, -1.0 / eps ** 2, -1.0 / zc ** 2)
    return f, d1, d2


def solve_lambda(W):
    """Lagrange multiplier solving ``(1/n) sum W_i / (1 + lam^T W_i) = 0``.

    Damped Newton on the convex dual ``-(1/n) sum log*(1 + lam^T W_i)`` with
    step halving.  Stops when the gradient's max-norm is at most ``1e-10``
    (and ``lam^T grad`` is equally small, which rules out the vanishing
    gradient along a divergent ray) or after 50 iterations.

    Returns
    -------
    lam : ndarray
    converged : bool
    iterations : int
    hull_ok : bool
        False when some ``1 + lam^T W_i <= 1/n`` at the returned ``lam``, or
        the implied weights do not sum to one; either way the origin is
        outside (or on the edge of) the convex hull of the scores.
    """
    W = np.asarray(W, dtype=float)
    if W.ndim == 1:
        W = W[:, None]
    n, p = W.shape
    if not np.all(np.isfinite(W)):
        raise InputError("score matrix has non-finite entries")
    if n < p + 1:
        raise DimensionError(f"need at least p + 1 = {p + 1} scores, got {n}")

    def objective(lam):
        f, d1, d2 = _log_star(1.0 + W @ lam, n)
        grad = -(W.T @ d1) / n
        hess = -(W.T * d2) @ W / n
        return -f.mean(), grad, hess

    lam = np.zeros(p)
    val, grad, hess = objective(lam)
    converged = False
    it = 0
    while True:
        if np.max(np.abs(grad)) <= GRAD_TOL and abs(lam @ grad) <= GRAD_TOL:
            converged = True
            break
        if it == MAX_NEWTON:
            break
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        t = 1.0
        for _ in range(MAX_HALVINGS):
            cand = lam - t * step
            cval, cgrad, chess = objective(cand)
            if cval <= val:
                break
            t /= 2
        else:
            break
        lam, val, grad, hess = cand, cval, cgrad, chess
        it += 1
    z = 1.0 + W @ lam
    hull_ok = bool(np.all(z > 1.0 / n)
                   and abs(np.sum(1.0 / (n * z)) - 1.0) <= NORMALIZATION_TOL)
    return lam, bool(converged), it, hull_ok


def neg2_log_el(W) -> ELEvaluation:
    """``-2 log R_n`` for the score matrix ``W`` (``inf`` on hull failure)."""
    W = np.asarray(W, dtype=float)
    if W.ndim == 1:
        W = W[:, None]
    lam, converged, iterations, hull_ok = solve_lambda(W)
    n = W.shape[0]
    z = 1.0 + W @ lam
    if hull_ok:
        pi = 1.0 / (n * z)
        stat = float(2.0 * np.sum(np.log(z)))
    else:
        pi = np.full(n, np.nan)
        stat = float("inf")
    return ELEvaluation(lam, pi, stat, converged, iterations, hull_ok)


def el_statistic(data: Dataset, basis: BSplineBasis, beta) -> ELEvaluation:
    return neg2_log_el(scores(data, basis, beta))
