"""Clamped B-spline bases with equally spaced knots and the functional design matrix."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import DimensionError, DomainError
from .numerics import Grid


@dataclass(frozen=True)
class BSplineBasis:
    """Degree-``degree`` B-splines on [0, 1] with ``interior_knots`` equally spaced knots.

    The knot vector repeats each boundary knot ``degree + 1`` times, so the
    space has dimension ``interior_knots + degree + 1``.
    """

    degree: int
    interior_knots: int
    knot_vector: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.degree < 0 or self.interior_knots < 0:
            raise DomainError("degree and interior knot count must be non-negative")
        k, m = self.degree, self.interior_knots
        interior = np.arange(1, m + 1) / (m + 1)
        knots = np.concatenate([np.zeros(k + 1), interior, np.ones(k + 1)])
        knots.setflags(write=False)
        object.__setattr__(self, "knot_vector", knots)

    @property
    def dimension(self) -> int:
        return self.interior_knots + self.degree + 1

    def support(self, j):
        """Closed interval outside which the ``j``-th basis function vanishes."""
        return self.knot_vector[j], self.knot_vector[j + self.degree + 1]


def make_basis(degree: int, interior_knots: int) -> BSplineBasis:
    return BSplineBasis(int(degree), int(interior_knots))


def basis_matrix(basis: BSplineBasis, t) -> np.ndarray:
    """Evaluate every basis function at each point of ``t``.

    Cox-de Boor recursion over the whole knot vector, with ``0/0 := 0``.
    The point ``t = 1`` is assigned to the last non-empty knot span.

    Returns
    -------
    ndarray of shape ``(len(t), basis.dimension)``
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any((t < 0) | (t > 1)) or not np.all(np.isfinite(t)):
        raise DomainError("evaluation points must lie in [0, 1]")
    knots = basis.knot_vector
    k = basis.degree
    n_spans = knots.size - 1
    left = knots[:-1][None, :]
    right = knots[1:][None, :]
    tt = t[:, None]
    vals = ((left <= tt) & (tt < right)).astype(float)
    # last non-degenerate span is [knots[-k-2], 1]
    vals[t == 1.0, n_spans - k - 1] = 1.0

    for d in range(1, k + 1):
        m = n_spans - d
        new = np.zeros((t.size, m))
        for j in range(m):
            den1 = knots[j + d] - knots[j]
            den2 = knots[j + d + 1] - knots[j + 1]
            if den1 > 0:
                new[:, j] += (t - knots[j]) / den1 * vals[:, j]
            if den2 > 0:
                new[:, j] += (knots[j + d + 1] - t) / den2 * vals[:, j + 1]
        vals = new
    return vals


def eval_basis(basis: BSplineBasis, t: float) -> np.ndarray:
    """Values ``(B_1(t), ..., B_kn(t))`` at a single point."""
    return basis_matrix(basis, t)[0]


def eval_spline(coefficients, basis: BSplineBasis, t):
    """Evaluate ``sum_s c_s B_s(t)``; ``t`` may be a scalar or an array."""
    c = np.asarray(coefficients, dtype=float)
    if c.shape != (basis.dimension,):
        raise DimensionError(f"expected {basis.dimension} coefficients, got {c.shape}")
    out = basis_matrix(basis, t) @ c
    return float(out[0]) if np.ndim(t) == 0 else out


@dataclass(frozen=True, eq=False)
class FunctionalSample:
    """``n`` curves sampled on a common grid; row ``i`` holds ``X_i`` on ``grid``."""

    grid: Grid
    curves: np.ndarray

    def __post_init__(self):
        curves = np.atleast_2d(np.asarray(self.curves, dtype=float))
        if curves.shape[1] != len(self.grid):
            raise DimensionError(
                f"curves have {curves.shape[1]} columns, grid has {len(self.grid)} points")
        if not np.all(np.isfinite(curves)):
            raise DomainError("curves contain non-finite values")
        object.__setattr__(self, "curves", curves)

    @property
    def n(self) -> int:
        return self.curves.shape[0]


@lru_cache(maxsize=256)
def _weighted_basis_on_grid(basis: BSplineBasis, grid: Grid) -> np.ndarray:
    out = grid.weights[:, None] * basis_matrix(basis, grid.points)
    out.setflags(write=False)
    return out


def functional_design(basis: BSplineBasis, sample: FunctionalSample) -> np.ndarray:
    """Design matrix ``B[i, j] = <X_i, B_j>`` by trapezoid quadrature on the sample grid."""
    return sample.curves @ _weighted_basis_on_grid(basis, sample.grid)
