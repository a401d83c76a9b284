import numpy as np
import pytest

from pflr_el.bspline import FunctionalSample
from pflr_el.numerics import Grid, make_rng
from pflr_el.pflr import Dataset
from pflr_el.simgen import ModelSpec, gen_dataset


def random_dataset(seed, n=30, p=2, noise=1.0, grid_points=41):
    """Generic dataset with smooth random curves and a random slope."""
    rng = np.random.default_rng(seed)
    grid = Grid.uniform(grid_points)
    t = grid.points
    # constant term included: without it every curve is orthogonal to sum_j B_j = 1
    freqs = np.arange(0, 30)
    curves = rng.normal(size=(n, 30)) @ (np.cos(np.pi * freqs[:, None] * t) / (1 + freqs[:, None]))
    Z = rng.normal(size=(n, p))
    alpha = np.sin(2 * np.pi * t) + t
    Y = Z @ rng.normal(size=p) + curves @ (grid.weights * alpha) + noise * rng.normal(size=n)
    return Dataset(Z, Y, FunctionalSample(grid, curves))


def model_dataset(model, n, seed, error="normal"):
    data, _ = gen_dataset(ModelSpec(model, n, error), make_rng(seed))
    return data


@pytest.fixture
def small_dataset():
    return random_dataset(0)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
