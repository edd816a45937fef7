"""Shared fixtures: the headline benchmark runs once per session."""

import numpy as np
import pytest

from choquard_lab import Grid, ProblemParams
from choquard_lab.solvers import SolveConfig, solve_picard, solve_scalar, solve_system


@pytest.fixture(scope="session")
def benchmark_params():
    return ProblemParams(N=2, alpha=1.0, p=2.0, q=2.0, tau=1.0, eta=1.0)


@pytest.fixture(scope="session")
def benchmark_grid():
    return Grid(N=2, L=20.0, n=128)


@pytest.fixture(scope="session")
def benchmark_config():
    return SolveConfig(max_iters=2000, tol_residual=1e-10)


@pytest.fixture(scope="session")
def scalar_run(benchmark_params, benchmark_grid, benchmark_config):
    w, report = solve_scalar(benchmark_params, benchmark_grid, benchmark_config)
    assert report.converged
    return w, report


@pytest.fixture(scope="session")
def system_run(benchmark_params, benchmark_grid, benchmark_config):
    u, v, report = solve_system(
        benchmark_params, benchmark_grid, benchmark_config, init_asymmetry=0.3
    )
    assert report.converged
    return u, v, report


@pytest.fixture(scope="session")
def picard_run(benchmark_params, benchmark_grid, benchmark_config):
    u, v, report = solve_picard(
        benchmark_params, benchmark_grid, benchmark_config, init_asymmetry=0.3
    )
    assert report.converged
    return u, v, report


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
