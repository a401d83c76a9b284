"""Shared numerical kernels: quadrature, symmetric linear algebra, chi-square
quantiles and random sampling primitives.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, special

from .exceptions import DimensionError, DomainError, NotPSDError, SingularMatrixError

SINGULAR_RTOL = 1e-10
PSD_CLAMP_RTOL = 1e-10
SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class Grid:
    """Ordered evaluation points on [0, 1], both endpoints included.

    The composite trapezoid weights are computed once and cached on the
    instance, so ``weights @ (f * g)`` is the inner product of two curves.
    """

    points: np.ndarray
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise DomainError("grid needs at least two points")
        if pts[0] != 0.0 or pts[-1] != 1.0:
            raise DomainError("grid must start at 0 and end at 1")
        if np.any(np.diff(pts) <= 0):
            raise DomainError("grid points must be strictly increasing")
        pts.setflags(write=False)
        h = np.diff(pts)
        w = np.zeros_like(pts)
        w[:-1] += h / 2
        w[1:] += h / 2
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, m: int = 101) -> "Grid":
        return cls(np.linspace(0.0, 1.0, m))

    def __len__(self):
        return self.points.size

    def __eq__(self, other):
        return isinstance(other, Grid) and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())


def trapezoid_inner_product(f, g, grid: Grid) -> float:
    """Composite trapezoid approximation of the integral of ``f * g`` over [0, 1]."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape or f.shape != (len(grid),):
        raise DimensionError(
            f"curve lengths {f.shape}, {g.shape} do not match grid of {len(grid)} points")
    return float(grid.weights @ (f * g))


def _check_symmetric(S, name="matrix"):
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {S.shape}")
    scale = max(np.abs(S).max(initial=0.0), np.finfo(float).tiny)
    if np.abs(S - S.T).max(initial=0.0) > SYMMETRY_RTOL * scale:
        raise DomainError(f"{name} is not symmetric")
    return (S + S.T) / 2


def sym_eig(S):
    """Eigendecomposition of a symmetric matrix.

    Returns
    -------
    eigenvalues : ndarray
        Sorted in descending order.
    eigenvectors : ndarray
        Orthonormal columns matching ``eigenvalues``.
    """
    S = _check_symmetric(S)
    vals, vecs = np.linalg.eigh(S)
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def spd_solve(S, rhs, name="matrix"):
    """Solve ``S @ T = rhs`` for symmetric positive definite ``S``.

    Raises :class:`SingularMatrixError` (carrying ``name``) when the smallest
    eigenvalue is at most ``1e-10`` times the largest.
    """
    S = _check_symmetric(S, name)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != S.shape[0]:
        raise DimensionError(f"{name} has order {S.shape[0]}, rhs has {rhs.shape[0]} rows")
    vals = np.linalg.eigvalsh(S)
    top = vals[-1]
    if top <= 0 or vals[0] <= SINGULAR_RTOL * top:
        raise SingularMatrixError(name, vals[0] / top if top > 0 else float("-inf"))
    return linalg.cho_solve(linalg.cho_factor(S, lower=True), rhs)


def sqrt_spd(S):
    """Symmetric PSD square root.

    Eigenvalues in ``[-1e-10 * max, 0)`` are clamped to zero; anything more
    negative raises :class:`NotPSDError`.
    """
    vals, vecs = sym_eig(S)
    top = max(vals[0], 0.0)
    if vals[-1] < -PSD_CLAMP_RTOL * top or (top == 0.0 and vals[-1] < 0):
        raise NotPSDError(f"matrix has eigenvalue {vals[-1]:.3g} (max {top:.3g})")
    root = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
    return (root + root.T) / 2


def chi2_quantile(prob: float, df: int) -> float:
    """Quantile of the chi-square distribution with ``df`` degrees of freedom."""
    if not 0.0 < prob < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {prob}")
    if df < 1 or int(df) != df:
        raise DomainError(f"degrees of freedom must be a positive integer, got {df}")
    # inverse of the regularized lower incomplete gamma P(df/2, x/2)
    return float(2.0 * special.gammaincinv(df / 2.0, prob))


# --- random streams -------------------------------------------------------

def make_rng(seed, *key) -> np.random.Generator:
    """Deterministic PCG64 stream for ``seed`` and an optional integer spawn key.

    Streams with different keys under the same ``seed`` are statistically
    independent (``numpy.random.SeedSequence`` hashing).
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed, *key) -> int:
    """64-bit integer seed derived from ``seed`` and ``key`` by SeedSequence hashing."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def sample_standard_normal(rng, size=None):
    return rng.standard_normal(size)


def sample_uniform(rng, a, b, size=None):
    return rng.uniform(a, b, size)


def sample_skew_normal_standardized(rng, shape, sd, size=None):
    """Skew-normal draws recentred and rescaled to mean 0 and standard deviation ``sd``.

    Uses ``delta*|N1| + sqrt(1 - delta^2)*N2`` with ``delta = shape / sqrt(1 + shape^2)``,
    whose population mean is ``delta*sqrt(2/pi)`` and variance ``1 - 2 delta^2 / pi``.
    """
    if sd <= 0:
        raise DomainError("sd must be positive")
    delta = shape / np.sqrt(1.0 + shape * shape)
    n1 = np.abs(rng.standard_normal(size))
    n2 = rng.standard_normal(size)
    raw = delta * n1 + np.sqrt(1.0 - delta * delta) * n2
    mean = delta * np.sqrt(2.0 / np.pi)
    scale = np.sqrt(1.0 - 2.0 * delta * delta / np.pi)
    return sd * (raw - mean) / scale
