"""Data generation for the three simulation models.

Curves are ``X_i(t) = sum_{j<=J} xi_ij j^{-1} phi_j(t)`` with the cosine
basis ``phi_1 = 1``, ``phi_j = sqrt(2) cos((j-1) pi t)`` and
``xi_ij ~ U[-sqrt 3, sqrt 3]`` (unit variance).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .bspline import FunctionalSample
from .exceptions import ConfigurationError
from .numerics import Grid, sample_skew_normal_standardized
from .pflr import Dataset

SKEW_SHAPE = 5.0
NORMAL, SKEW = "normal", "skew_normal"
ERROR_KINDS = (NORMAL, SKEW)

BETAS = {1: (1.0, 1.0), 2: (5.0, -1.7), 3: (2.0, -1.0)}
# model error standard deviation by (model, error kind); Model 1 reads N(0, 0.36) as a variance
ERROR_SD = {
    (1, NORMAL): 0.6, (1, SKEW): 1.0,
    (2, NORMAL): 1.0, (2, SKEW): 1.0,
    (3, NORMAL): 0.5, (3, SKEW): 0.5,
}
MODEL1_Z_COV = np.array([[0.9, 0.2], [0.2, 0.5]])
MODEL3_Z_ERROR_SD = (0.5, 0.8)


@dataclass(frozen=True)
class ModelSpec:
    model_id: int
    n: int
    error_kind: str = NORMAL
    grid: Grid = field(default_factory=Grid.uniform)
    fourier_terms: int = 50
    error_sd: Optional[float] = None  # overrides the model's default error sd

    def __post_init__(self):
        if self.model_id not in BETAS:
            raise ConfigurationError(f"unknown model id {self.model_id}; expected 1, 2 or 3")
        if self.error_kind not in ERROR_KINDS:
            raise ConfigurationError(f"unknown error kind {self.error_kind!r}")
        if self.n < 10:
            raise ConfigurationError("n must be at least 10")
        if self.fourier_terms < 1:
            raise ConfigurationError("fourier_terms must be positive")

    @property
    def sd(self) -> float:
        return self.error_sd if self.error_sd is not None else ERROR_SD[self.model_id, self.error_kind]


@dataclass(frozen=True, eq=False)
class TruthRecord:
    beta: np.ndarray
    alpha: np.ndarray  # on the dataset grid
    error_kind: str
    error_sd: float


def cosine_basis(t, terms: int) -> np.ndarray:
    """``phi_j(t)`` for ``j = 1..terms``, shape ``(terms, len(t))``."""
    t = np.asarray(t, dtype=float)
    j = np.arange(terms)[:, None]
    out = np.sqrt(2.0) * np.cos(j * np.pi * t[None, :])
    out[0] = 1.0
    return out


@lru_cache(maxsize=32)
def _scaled_cosines(grid: Grid, terms: int) -> np.ndarray:
    out = cosine_basis(grid.points, terms) / np.arange(1, terms + 1)[:, None]
    out.setflags(write=False)
    return out


def gen_X(n: int, grid: Grid, rng, terms: int = 50) -> FunctionalSample:
    xi = rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), size=(n, terms))
    return FunctionalSample(grid, xi @ _scaled_cosines(grid, terms))


def model1_alpha(t, terms=50):
    j = np.arange(2, terms + 1)
    coef = np.concatenate([[np.sqrt(2.0) / 2], 4.0 / j ** 2])
    return coef @ cosine_basis(t, terms)


def model2_alpha(t):
    t = np.asarray(t, dtype=float)
    return (2 * np.sin(0.5 * np.pi * t) + 4 * np.sin(1.5 * np.pi * t)
            + 5 * np.sin(2.5 * np.pi * t))


def model3_z_coefficients(terms=50):
    """Cosine coefficients of the two functions that drive ``Z`` in Model 3."""
    j = np.arange(1, terms + 1, dtype=float)
    b1 = 2.0 / j ** 2
    b2 = 3.0 / j ** 2
    b1[0], b2[0] = 1.0, -0.5
    return b1, b2


def alpha_for(model_id, t, terms=50):
    # Model 3 does not state its slope function; it reuses Model 1's
    if model_id in (1, 3):
        return model1_alpha(t, terms)
    if model_id == 2:
        return model2_alpha(t)
    raise ConfigurationError(f"unknown model id {model_id}")


def population_moments(model_id: int, terms: int = 50):
    """Population ``(Sigma, Sigma1)``: ``Var(Z - E[Z|X])`` and ``E[Z Z^T]``.

    Model 3 uses exact inner products of the cosine series (the basis is
    orthonormal and ``Var(xi) = 1``).
    """
    if model_id == 1:
        return MODEL1_Z_COV.copy(), MODEL1_Z_COV.copy()
    if model_id == 2:
        return np.eye(2), np.eye(2)
    if model_id == 3:
        b1, b2 = model3_z_coefficients(terms)
        c = np.vstack([b1, b2]) / np.arange(1, terms + 1)
        Sigma = np.diag(np.square(MODEL3_Z_ERROR_SD))
        return Sigma, c @ c.T + Sigma
    raise ConfigurationError(f"unknown model id {model_id}")


def _model_error(spec: ModelSpec, rng, n):
    if spec.error_kind == NORMAL:
        return spec.sd * rng.standard_normal(n)
    return sample_skew_normal_standardized(rng, SKEW_SHAPE, spec.sd, n)


def gen_dataset(spec: ModelSpec, rng):
    """Simulate one dataset; returns ``(Dataset, TruthRecord)``.

    Draw order is fixed (curves, covariates, model error) so a given
    generator state always yields the same dataset.
    """
    grid, n, J = spec.grid, spec.n, spec.fourier_terms
    X = gen_X(n, grid, rng, J)
    if spec.model_id == 1:
        Z = rng.multivariate_normal(np.zeros(2), MODEL1_Z_COV, size=n, method="cholesky")
    elif spec.model_id == 2:
        Z = rng.standard_normal((n, 2))
    else:
        b1, b2 = model3_z_coefficients(J)
        basis = cosine_basis(grid.points, J)
        drivers = np.vstack([b1 @ basis, b2 @ basis])
        Z = (X.curves * grid.weights) @ drivers.T
        Z = Z + rng.standard_normal((n, 2)) * np.asarray(MODEL3_Z_ERROR_SD)
    beta = np.asarray(BETAS[spec.model_id])
    alpha = alpha_for(spec.model_id, grid.points, J)
    eps = _model_error(spec, rng, n)
    Y = Z @ beta + X.curves @ (grid.weights * alpha) + eps
    truth = TruthRecord(beta, alpha, spec.error_kind, spec.sd)
    return Dataset(Z, Y, X, truth), truth
