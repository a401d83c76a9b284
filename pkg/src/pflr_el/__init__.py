"""Partial functional linear regression with B-splines and empirical-likelihood
confidence regions for the scalar coefficients."""

__version__ = "0.1.0"

from .bspline import BSplineBasis, FunctionalSample, eval_basis, eval_spline, functional_design, make_basis
from .el import ELEvaluation, el_statistic, neg2_log_el, scores, solve_lambda
from .inference import (na_statistic, region_contains, sigma0_weights,
                        weighted_chisq_quantile)
from .numerics import Grid
from .pflr import Dataset, PFLRFit, alpha_hat, fit, hat_matrix, loocv_score, select_knots
from .simgen import ModelSpec, gen_dataset

__all__ = [
    "BSplineBasis", "Dataset", "ELEvaluation", "FunctionalSample", "Grid", "ModelSpec",
    "PFLRFit", "alpha_hat", "el_statistic", "eval_basis", "eval_spline", "fit",
    "functional_design", "gen_dataset", "hat_matrix", "loocv_score", "make_basis",
    "na_statistic", "neg2_log_el", "region_contains", "scores", "select_knots",
    "sigma0_weights", "solve_lambda", "weighted_chisq_quantile",
]
