"""Solver behavior: convergence, invariants, equivariance, cross-validation."""

import numpy as np
import pytest

from choquard_lab.analysis import radial_deviation, recenter_fine, tau_rescale
from choquard_lab.functionals import scalar_action
from choquard_lab.grid import Field, Grid, l2_norm
from choquard_lab.params import ProblemParams
from choquard_lab.solvers import (
    SolveConfig,
    boundary_peak_ratio,
    gaussian_bump,
    picard_step,
    solve_picard,
    solve_scalar,
    solve_system,
)


def energy_nonincreasing(history):
    history = np.asarray(history)
    if history.size < 2:
        return True
    scale = np.abs(history).max()
    return np.all(np.diff(history) <= 1e-12 * scale)


def test_solve_config_validation():
    with pytest.raises(ValueError):
        SolveConfig(max_iters=0)
    with pytest.raises(ValueError):
        SolveConfig(tol_residual=0.0)
    with pytest.raises(ValueError):
        SolveConfig(backtrack=1.0)


def test_scalar_benchmark_positive_and_radial(benchmark_params, scalar_run):
    w, report = scalar_run
    assert report.converged
    assert report.residual_history[-1] <= 1e-10
    assert w.values.min() >= 0.0
    assert w.values.max() > 0.1
    centered, _ = recenter_fine(w)
    deviation, monotone = radial_deviation(centered)
    assert deviation <= 1e-3
    assert monotone <= 1e-6 * w.max_abs()


def test_scalar_energy_monotone(scalar_run):
    _, report = scalar_run
    assert energy_nonincreasing(report.energy_history)


def test_scalar_report_invariants(scalar_run, benchmark_config):
    _, report = scalar_run
    assert (report.residual_history[-1] <= benchmark_config.tol_residual) == report.converged


def test_scalar_idempotent_restart(benchmark_params, benchmark_grid, benchmark_config, scalar_run):
    w, report = scalar_run
    w2, report2 = solve_scalar(benchmark_params, benchmark_grid, benchmark_config, init_field=w)
    a_before = scalar_action(w, benchmark_params)
    a_after = scalar_action(w2, benchmark_params)
    assert abs(a_after - a_before) <= 1e-10 * abs(a_before)
    assert report2.iterations <= 2


def test_scalar_rejects_asymmetric_params(benchmark_grid):
    params = ProblemParams(N=2, alpha=1.0, p=2.0, q=2.5)
    with pytest.raises(ValueError):
        solve_scalar(params, benchmark_grid, SolveConfig())


def test_scalar_rejects_inadmissible():
    # p = q = 1.2 < 1 + alpha/N = 1.5 violates the first gate.
    params = ProblemParams(N=2, alpha=1.0, p=1.2, q=1.2)
    with pytest.raises(ValueError):
        solve_scalar(params, Grid(N=2, L=10.0, n=32), SolveConfig())


def test_scalar_tau_family_consistency(benchmark_params, benchmark_grid, benchmark_config, scalar_run):
    """Direct solve at tau = 4 matches the rescaled tau = 1 solution."""
    w1, _ = scalar_run
    params4 = ProblemParams(N=2, alpha=1.0, p=2.0, q=2.0, tau=4.0, eta=4.0)
    grid4 = Grid(N=2, L=benchmark_grid.L / 2.0, n=benchmark_grid.n)
    w4, report4 = solve_scalar(params4, grid4, benchmark_config)
    assert report4.converged
    w1s, _, _ = tau_rescale(w1, w1, 4.0, benchmark_params)
    rel = l2_norm(Field(grid4, w1s.values) - w4) / l2_norm(w4)
    assert rel <= 0.01


def test_scalar_nonconvergence_report(benchmark_params, benchmark_grid):
    config = SolveConfig(max_iters=1, tol_residual=1e-10)
    _, report = solve_scalar(benchmark_params, benchmark_grid, config)
    assert not report.converged
    assert report.residual_history[-1] > config.tol_residual


def test_scalar_collapse_on_bad_step(benchmark_params):
    grid = Grid(N=2, L=10.0, n=32)
    config = SolveConfig(max_iters=50, tol_residual=1e-10, step0=1e8, backtrack=0.999999999)
    _, report = solve_scalar(benchmark_params, grid, config)
    assert not report.converged


def test_system_benchmark_headline(system_run):
    u, v, report = system_run
    assert report.converged
    assert u.values.min() >= 0.0 and v.values.min() >= 0.0
    closeness = min(l2_norm(u - v), l2_norm(u + v)) / l2_norm(u)
    assert closeness <= 1e-3


def test_system_energy_monotone(system_run):
    _, _, report = system_run
    assert energy_nonincreasing(report.energy_history)


def test_system_symmetric_init_stays_symmetric(benchmark_params):
    grid = Grid(N=2, L=15.0, n=64)
    for iters in (1, 3, 10):
        config = SolveConfig(max_iters=iters, tol_residual=1e-14)
        u, v, _ = solve_system(benchmark_params, grid, config, init_asymmetry=0.0)
        assert np.array_equal(u.values, v.values)


def test_system_swap_equivariance(benchmark_params):
    """Swapped initial pairs produce swapped outputs (exactly, by design)."""
    grid = Grid(N=2, L=15.0, n=64)
    r2 = np.zeros(grid.shape)
    for c in grid.meshgrid():
        r2 = r2 + c * c
    f = Field(grid, np.exp(-r2 / 4.0))
    x = grid.meshgrid()[0]
    g = Field(grid, 1.25 * np.exp(-r2 / 5.0) * np.broadcast_to(1 + 0.1 * np.sin(np.pi * x / grid.L), grid.shape))
    config = SolveConfig(max_iters=300, tol_residual=1e-9)
    u1, v1, rep1 = solve_system(benchmark_params, grid, config, init_fields=(f, g))
    u2, v2, rep2 = solve_system(benchmark_params, grid, config, init_fields=(g, f))
    assert l2_norm(u1 - v2) <= 1e-10 * l2_norm(u1)
    assert l2_norm(v1 - u2) <= 1e-10 * l2_norm(v1)


def test_system_general_exponents_converges():
    params = ProblemParams(N=3, alpha=2.0, p=2.0, q=2.5, tau=1.0, eta=1.3)
    grid = Grid(N=3, L=10.0, n=32)
    config = SolveConfig(max_iters=500, tol_residual=1e-8)
    u, v, report = solve_system(params, grid, config, init_asymmetry=0.3, dipole=0.0)
    assert report.converged
    assert report.residual_history[-1] <= 1e-8


def test_picard_step_zero_and_positivity(benchmark_params):
    grid = Grid(N=2, L=10.0, n=32)
    zero = Field(grid, np.zeros(grid.shape))
    u_next, v_next = picard_step(zero, zero, benchmark_params)
    assert np.allclose(u_next.values, 0.0) and np.allclose(v_next.values, 0.0)

    g = gaussian_bump(grid)
    u_next, v_next = picard_step(g, 0.5 * g, benchmark_params)
    assert u_next.values.min() >= 0.0
    assert v_next.values.min() >= 0.0
    assert u_next.values.max() > 0.0


def test_picard_fixed_point_at_converged_pair(
    benchmark_params, system_run, benchmark_config
):
    u, v, report = system_run
    u_next, v_next = picard_step(u, v, benchmark_params)
    move = (l2_norm(u_next - u) + l2_norm(v_next - v)) / (l2_norm(u) + l2_norm(v))
    assert move <= 10.0 * benchmark_config.tol_residual


def test_picard_solver_agrees_with_descent(system_run, picard_run):
    _, _, descent_report = system_run
    _, _, picard_report = picard_run
    j_descent = descent_report.final.j
    j_picard = picard_report.final.j
    assert abs(j_descent - j_picard) <= 1e-4 * abs(j_descent)


def test_picard_one_step_from_converged_is_identity(
    benchmark_params, benchmark_grid, benchmark_config, system_run
):
    u, v, _ = system_run
    config = SolveConfig(max_iters=1, tol_residual=1e-6)
    _, _, report = solve_picard(
        benchmark_params, benchmark_grid, config, init_fields=(u, v)
    )
    assert report.converged
    assert report.residual_history[-1] <= 1e-8


def test_picard_collapse_without_rescaling(benchmark_params, benchmark_grid, system_run):
    """The bare fixed-point map contracts scaled-down states toward zero."""
    u, v, _ = system_run
    config = SolveConfig(max_iters=400, tol_residual=1e-12)
    _, _, report = solve_picard(
        benchmark_params,
        benchmark_grid,
        config,
        rescale=False,
        init_fields=(0.5 * u, 0.5 * v),
    )
    assert report.collapsed
    assert not report.converged


def test_boundary_peak_ratio():
    grid = Grid(N=2, L=10.0, n=32)
    g = gaussian_bump(grid, sigma=1.0)
    assert boundary_peak_ratio(g) < 1e-10
    wide = gaussian_bump(grid, sigma=8.0)
    assert boundary_peak_ratio(wide) > 1e-10


def test_report_serialization(scalar_run):
    _, report = scalar_run
    data = report.to_dict()
    assert set(data) == {
        "iterations",
        "residual_history",
        "energy_history",
        "final",
        "converged",
        "collapsed",
        "message",
    }
    assert set(data["final"]) == {
        "j", "a_scalar", "q", "f1", "f2", "a", "b", "s_est", "t_est", "c_est",
    }
