import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pflr_el.bspline import (FunctionalSample, basis_matrix, eval_basis, eval_spline,
                             functional_design, make_basis)
from pflr_el.exceptions import DimensionError, DomainError
from pflr_el.numerics import Grid


@pytest.mark.parametrize("k", range(4))
@pytest.mark.parametrize("m", range(11))
def test_dimension(k, m):
    b = make_basis(k, m)
    assert b.dimension == m + k + 1
    assert b.knot_vector.size == b.dimension + k + 1


def test_knot_vector_clamped_and_uniform():
    b = make_basis(2, 3)
    np.testing.assert_allclose(b.knot_vector, [0, 0, 0, 0.25, 0.5, 0.75, 1, 1, 1])


def test_degree_zero_no_knots_is_indicator():
    b = make_basis(0, 0)
    assert b.dimension == 1
    for t in (0.0, 0.3, 1.0):
        np.testing.assert_array_equal(eval_basis(b, t), [1.0])


def test_bernstein_when_no_interior_knots():
    b = make_basis(2, 0)
    t = np.linspace(0, 1, 13)
    bern = np.column_stack([(1 - t) ** 2, 2 * t * (1 - t), t ** 2])
    np.testing.assert_allclose(basis_matrix(b, t), bern, atol=1e-15)
    np.testing.assert_array_equal(eval_basis(b, 0.0), [1, 0, 0])


def test_hat_functions_by_hand():
    # knots (0, 0, 0.5, 1, 1): B1 = 1 - 2t, B2 = 2t on [0, 0.5]
    np.testing.assert_allclose(eval_basis(make_basis(1, 1), 0.25), [0.5, 0.5, 0.0], atol=1e-15)


def test_right_endpoint():
    for k in range(4):
        for m in range(5):
            v = eval_basis(make_basis(k, m), 1.0)
            assert v[-1] == pytest.approx(1.0)
            assert np.all(v[:-1] == 0)


def test_against_scipy_design_matrix():
    from scipy.interpolate import BSpline
    t = np.linspace(0, 1, 77)
    for k in range(4):
        for m in (0, 1, 4, 9):
            b = make_basis(k, m)
            ref = BSpline.design_matrix(t, b.knot_vector, k).toarray()
            np.testing.assert_allclose(basis_matrix(b, t), ref, atol=1e-14)


@pytest.mark.parametrize("t", [-0.01, 1.01, np.nan])
def test_domain(t):
    with pytest.raises(DomainError):
        eval_basis(make_basis(2, 3), t)


def test_partition_of_unity_and_support_random():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        k, m, t = rng.integers(0, 4), rng.integers(0, 11), rng.uniform()
        b = make_basis(k, m)
        v = eval_basis(b, t)
        assert abs(v.sum() - 1) < 1e-12
        assert np.all(v >= 0)
        for j in range(b.dimension):
            lo, hi = b.support(j)
            if t < lo or t > hi:
                assert v[j] == 0.0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 3), st.integers(0, 10), st.floats(0, 1))
def test_partition_of_unity_property(k, m, t):
    v = eval_basis(make_basis(k, m), t)
    assert abs(v.sum() - 1) < 1e-12 and v.min() >= 0


class TestEvalSpline:
    def test_constant(self):
        b = make_basis(2, 4)
        t = np.linspace(0, 1, 11)
        np.testing.assert_allclose(eval_spline(np.full(b.dimension, 3.5), b, t), 3.5)

    def test_first_unit_coefficient_at_zero(self):
        b = make_basis(2, 4)
        e1 = np.zeros(b.dimension)
        e1[0] = 1
        assert eval_spline(e1, b, 0.0) == pytest.approx(1.0)

    def test_direct_summation(self):
        rng = np.random.default_rng(3)
        b = make_basis(3, 5)
        c = rng.normal(size=b.dimension)
        for t in rng.uniform(size=20):
            direct = sum(c[j] * eval_basis(b, t)[j] for j in range(b.dimension))
            assert eval_spline(c, b, t) == pytest.approx(direct, abs=1e-13)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            eval_spline(np.ones(3), make_basis(2, 4), 0.5)


class TestFunctionalDesign:
    grid = Grid.uniform(101)

    def test_constant_curves_rows_sum_to_one(self):
        B = functional_design(make_basis(2, 5), FunctionalSample(self.grid, np.ones((4, 101))))
        np.testing.assert_allclose(B.sum(axis=1), 1.0, atol=1e-10)

    def test_zero_curves(self):
        B = functional_design(make_basis(2, 5), FunctionalSample(self.grid, np.zeros((3, 101))))
        assert np.all(B == 0)

    def test_fine_grid_oracle(self):
        # trapezoid error grows with knot count; (2, 3) is the basis of the dimension example
        b = make_basis(2, 3)
        coarse, fine = self.grid, Grid.uniform(10_001)
        curve = lambda g: np.sqrt(2) * np.cos(np.pi * g.points)[None, :]
        Bc = functional_design(b, FunctionalSample(coarse, curve(coarse)))
        Bf = functional_design(b, FunctionalSample(fine, curve(fine)))
        np.testing.assert_allclose(Bc, Bf, atol=1e-4)

    def test_linear_in_curves(self):
        rng = np.random.default_rng(11)
        X1, X2 = rng.normal(size=(2, 6, 101))
        b = make_basis(2, 3)
        D = lambda X: functional_design(b, FunctionalSample(self.grid, X))
        np.testing.assert_allclose(D(2.5 * X1 - 0.7 * X2), 2.5 * D(X1) - 0.7 * D(X2), atol=1e-12)

    def test_grid_mismatch(self):
        with pytest.raises(DimensionError):
            FunctionalSample(self.grid, np.ones((2, 50)))
