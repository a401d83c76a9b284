"""Profile least-squares fit of the partial functional linear model

    Y_i = Z_i^T beta + <X_i, alpha> + eps_i,

with ``alpha`` expanded in a B-spline basis, plus leave-one-out
cross-validation for the number of interior knots.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Optional

import numpy as np

from .bspline import BSplineBasis, FunctionalSample, eval_spline, functional_design, make_basis
from .exceptions import ConfigurationError, DimensionError, SingularMatrixError
from .numerics import spd_solve

LEVERAGE_CEILING = 1.0 - 1e-8
MAX_CANDIDATE_KNOTS = 15


@dataclass(frozen=True, eq=False)
class Dataset:
    """Scalar covariates ``Z`` (n x p), responses ``Y`` (n) and curves ``X``.

    ``truth`` is an optional record of the generating parameters (see
    :class:`pflr_el.simgen.TruthRecord`); fitting never looks at it.
    """

    Z: np.ndarray
    Y: np.ndarray
    X: FunctionalSample
    truth: Optional[Any] = None

    def __post_init__(self):
        Z = np.asarray(self.Z, dtype=float)
        if Z.ndim == 1:
            Z = Z[:, None]
        Y = np.asarray(self.Y, dtype=float).ravel()
        if Z.shape[0] != Y.size or self.X.n != Y.size:
            raise DimensionError(
                f"inconsistent sample sizes: Z {Z.shape[0]}, Y {Y.size}, X {self.X.n}")
        if Z.shape[1] < 1 or Y.size <= Z.shape[1]:
            raise DimensionError("need p >= 1 and n > p")
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self) -> int:
        return self.Y.size

    @property
    def p(self) -> int:
        return self.Z.shape[1]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return Dataset(self.Z[rows], self.Y[rows],
                       FunctionalSample(self.X.grid, self.X.curves[rows]), self.truth)


@dataclass(frozen=True, eq=False)
class PFLRFit:
    beta_hat: np.ndarray
    b_hat: np.ndarray
    basis: BSplineBasis
    sigma2_hat: float
    Sigma_hat: np.ndarray   # (1/n) Z^T (I - A) Z, estimates Var(Z - E[Z|X])
    Sigma1_hat: np.ndarray  # (1/n) Z^T Z, estimates E[Z Z^T]
    residuals: np.ndarray
    fitted: np.ndarray
    leverage: np.ndarray    # diagonal of the hat matrix

    @property
    def n(self) -> int:
        return self.residuals.size

    @property
    def p(self) -> int:
        return self.beta_hat.size


def _check_size(n, p, k_n):
    if k_n >= n - p:
        raise ConfigurationError(
            f"spline dimension k_n={k_n} must be smaller than n - p = {n - p}")


def smoother_coefficients(B) -> np.ndarray:
    """``(B^T B)^{-1} B^T``; the spline projection is ``A = B @ smoother_coefficients(B)``."""
    return spd_solve(B.T @ B, B.T, name="B^T B")


class _ProfileSolver:
    """Factorised pieces of the profile least-squares problem for fixed ``(Z, B)``."""

    def __init__(self, Z, B):
        self.Z = Z
        self.B = B
        n = Z.shape[0]
        # P = (B^T B)^{-1} B^T, so that A = B P
        self.P = smoother_coefficients(B)
        self.Zt = Z - B @ (self.P @ Z)
        M = self.Zt.T @ self.Zt
        self.M = (M + M.T) / 2
        self.M_inv_Zt = spd_solve(self.M, self.Zt.T, name="Z^T (I-A) Z")
        self.n = n

    def project_out(self, v):
        """``(I - A) v``."""
        return v - self.B @ (self.P @ v)

    def leverage(self):
        a_diag = np.einsum("ij,ji->i", self.B, self.P)
        return a_diag + np.einsum("ij,ji->i", self.Zt, self.M_inv_Zt)

    def hat(self):
        return self.B @ self.P + self.Zt @ self.M_inv_Zt

    def solve(self, Y):
        beta = self.M_inv_Zt @ Y
        b = self.P @ (Y - self.Z @ beta)
        return beta, b


def fit(data: Dataset, basis: BSplineBasis) -> PFLRFit:
    """Profile least-squares estimates of ``beta`` and the spline coefficients.

    Raises
    ------
    ConfigurationError
        If ``basis.dimension >= n - p``.
    SingularMatrixError
        If ``B^T B`` or ``Z^T (I - A) Z`` is numerically singular.
    """
    _check_size(data.n, data.p, basis.dimension)
    B = functional_design(basis, data.X)
    solver = _ProfileSolver(data.Z, B)
    beta, b = solver.solve(data.Y)
    fitted = data.Z @ beta + B @ b
    resid = data.Y - fitted
    n = data.n
    S1 = data.Z.T @ data.Z / n
    return PFLRFit(
        beta_hat=beta,
        b_hat=b,
        basis=basis,
        sigma2_hat=float(resid @ resid / n),
        Sigma_hat=solver.M / n,
        Sigma1_hat=(S1 + S1.T) / 2,
        residuals=resid,
        fitted=fitted,
        leverage=solver.leverage(),
    )


def alpha_hat(fit_: PFLRFit, t):
    """Estimated slope function at ``t`` (scalar or array)."""
    return eval_spline(fit_.b_hat, fit_.basis, t)


def hat_matrix(Z, B) -> np.ndarray:
    """``H`` with ``Y_hat = H Y``: ``A + (I-A) Z (Z^T (I-A) Z)^{-1} Z^T (I-A)``."""
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    B = np.asarray(B, dtype=float)
    _check_size(Z.shape[0], Z.shape[1], B.shape[1])
    return _ProfileSolver(Z, B).hat()


def _deleted_prediction(Z, Y, B, i):
    keep = np.arange(Y.size) != i
    _check_size(int(keep.sum()), Z.shape[1], B.shape[1])
    beta, b = _ProfileSolver(Z[keep], B[keep]).solve(Y[keep])
    return Z[i] @ beta + B[i] @ b


def loocv_score(data: Dataset, basis: BSplineBasis) -> float:
    """Leave-one-out prediction error ``(1/n) sum ((Y_i - Yhat_i) / (1 - H_ii))^2``.

    Points with leverage at or above ``1 - 1e-8`` are handled by an explicit
    deletion refit.  Returns ``inf`` for infeasible bases (``k_n + p >= n`` or
    singular systems).
    """
    n, p = data.n, data.p
    if basis.dimension + p >= n:
        return float("inf")
    B = functional_design(basis, data.X)
    try:
        solver = _ProfileSolver(data.Z, B)
    except SingularMatrixError:
        return float("inf")
    beta, b = solver.solve(data.Y)
    resid = data.Y - data.Z @ beta - B @ b
    h = solver.leverage()
    loo = np.empty(n)
    ok = h < LEVERAGE_CEILING
    loo[ok] = resid[ok] / (1.0 - h[ok])
    for i in np.flatnonzero(~ok):
        try:
            loo[i] = data.Y[i] - _deleted_prediction(data.Z, data.Y, B, i)
        except (SingularMatrixError, ConfigurationError):
            return float("inf")
    return float(np.mean(loo * loo))


def default_candidates(n: int, degree: int) -> range:
    return range(1, min(MAX_CANDIDATE_KNOTS, n // 4 - degree - 1) + 1)


def select_knots(data: Dataset, degree: int = 2,
                 candidates: Optional[Iterable[int]] = None) -> int:
    """Number of interior knots minimising :func:`loocv_score`, ties to the smaller count."""
    if candidates is None:
        candidates = default_candidates(data.n, degree)
    candidates = sorted(set(int(c) for c in candidates))
    if not candidates:
        raise ConfigurationError("no knot candidates to choose from")
    scores = [loocv_score(data, make_basis(degree, c)) for c in candidates]
    best = int(np.argmin(scores))
    if not np.isfinite(scores[best]):
        raise ConfigurationError(
            f"every knot candidate {candidates} is infeasible for n={data.n}, p={data.p}")
    return candidates[best]
