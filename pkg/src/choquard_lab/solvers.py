"""Ground-state solvers: Nehari-projected gradient descent and Picard iteration.

Primary algorithm (scalar and pair): preconditioned descent.  Each step moves
against the H1-metric gradient of the action, clips to the nonnegative cone
(the targets are positive ground states), projects back onto the Nehari
constraint by exact homogeneity scaling, and backtracks until the action
decreases.  On the constraint the action has the closed forms

    scalar:  (1/2 - 1/(2p)) k^2 |w|_{tau}^2
    pair:    (1/2 - 1/(p+q)) (s^2 |u|_{tau}^2 + t^2 |v|_{eta}^2)

so line-search trials cost no extra transforms.  The gradient of the
constraint-reduced action coincides with the unconstrained one on the
manifold, which makes the Armijo slope exact.

Secondary algorithm: fixed-point (Picard) iteration of the integral form
u = (2p/(p+q)) G_tau * (phi_v u^(p-1)), with per-step Nehari rescaling to tame
the scaling instability of the bare map.  The two solvers cross-validate each
other in the verification harness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .functionals import (
    EnergyReport,
    UnscalableError,
    _nonlinear_terms,
    action_general,
    nehari_pair_scales_from,
    pair_energy_report,
    scalar_energy_report,
)
from .grid import Field, Grid, h1_norm_sq, l2_norm, pointwise_power
from .params import ProblemParams, check_h1
from .potentials import bessel_solve, helmholtz_apply, riesz_bilinear, riesz_convolve

__all__ = [
    "SolveConfig",
    "SolveReport",
    "CollapseError",
    "gaussian_bump",
    "boundary_peak_ratio",
    "solve_scalar",
    "solve_system",
    "picard_step",
    "solve_picard",
]

_ARMIJO = 1e-4
_MAX_BACKTRACKS = 60
_COLLAPSE_REL = 1e-12
_INIT_WIDTH_FACTOR = 8.0  # initial Gaussian width is L / 8
_DIPOLE_AMPLITUDE = 0.1
# Below this slope the Armijo decrease is unresolvable in double precision
# and the line search degenerates; the solvers then polish with plain
# projected fixed-point steps, which keep contracting the residual.
_SLOPE_FLOOR_REL = 1e-12
_STALL_PATIENCE = 8


class CollapseError(RuntimeError):
    """Iterate collapsed to zero; usually signals a bad initial step size."""


@dataclass(frozen=True)
class SolveConfig:
    """Knobs of one solver run."""

    max_iters: int = 500
    tol_residual: float = 1e-8
    step0: float = 1.0
    backtrack: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.tol_residual > 0.0:
            raise ValueError(f"tol_residual must be > 0, got {self.tol_residual}")
        if not self.step0 > 0.0:
            raise ValueError(f"step0 must be > 0, got {self.step0}")
        if not 0.0 < self.backtrack < 1.0:
            raise ValueError(f"backtrack must be in (0, 1), got {self.backtrack}")


@dataclass
class SolveReport:
    """Trace of one solver run.

    ``energy_history`` is nonincreasing for the descent solvers (monotone
    line-search contract); the Picard solver records energies informationally
    without that guarantee.  The final residual entry is <= tol_residual
    exactly when ``converged`` is set.
    """

    iterations: int = 0
    residual_history: list[float] = field(default_factory=list)
    energy_history: list[float] = field(default_factory=list)
    final: EnergyReport = field(default_factory=EnergyReport)
    converged: bool = False
    collapsed: bool = False
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "residual_history": self.residual_history,
            "energy_history": self.energy_history,
            "final": self.final.to_dict(),
            "converged": self.converged,
            "collapsed": self.collapsed,
            "message": self.message,
        }


def gaussian_bump(grid: Grid, sigma: float | None = None, amplitude: float = 1.0) -> Field:
    """Centered positive Gaussian used as the canonical initial iterate."""
    if sigma is None:
        sigma = grid.L / _INIT_WIDTH_FACTOR
    return Field(grid, amplitude * np.exp(-grid.radius_sq() / (2.0 * sigma**2)))


def _smooth_noise(grid: Grid, rng: np.random.Generator) -> Field:
    """Band-limited unit-peak noise for multistart jitter."""
    raw = Field(grid, rng.standard_normal(grid.shape))
    smooth = bessel_solve(raw, 1.0)
    peak = smooth.max_abs()
    if peak == 0.0:
        return raw * 0.0
    return smooth * (1.0 / peak)


def boundary_peak_ratio(f: Field) -> float:
    """max |f| over the box faces divided by max |f|; decay diagnostic."""
    peak = f.max_abs()
    if peak == 0.0:
        return 0.0
    worst = 0.0
    for axis in range(f.grid.N):
        face = np.take(f.values, 0, axis=axis)
        worst = max(worst, float(np.max(np.abs(face))))
    return worst / peak


def _require_h1(params: ProblemParams) -> None:
    verdict = check_h1(params)
    if not verdict:
        raise ValueError(f"parameters are not admissible: {', '.join(verdict.violated)}")


def _clip_nonnegative(f: Field) -> Field:
    return Field(f.grid, np.maximum(f.values, 0.0))


# -- scalar ground state ----------------------------------------------------


def solve_scalar(
    params: ProblemParams,
    grid: Grid,
    config: SolveConfig,
    init_field: Field | None = None,
    jitter: float = 0.0,
) -> tuple[Field, SolveReport]:
    """Ground state of the scalar equation by Nehari-projected descent.

    Returns a nonnegative, nontrivial state whose relative PDE residual
    |(-Lap+tau)w - (I_alpha*|w|^p)|w|^(p-2)w| / |(-Lap+tau)w| is below the
    configured tolerance on success.  On nonconvergence the report is
    returned with ``converged`` false; collapse to zero sets ``collapsed``.
    """
    _require_h1(params)
    if params.p != params.q or params.tau != params.eta:
        raise ValueError("scalar solve requires p = q and tau = eta")
    p, tau, alpha = params.p, params.tau, params.alpha
    level_factor = 0.5 - 1.0 / (2.0 * p)

    w = init_field if init_field is not None else gaussian_bump(grid)
    if jitter != 0.0:
        rng = np.random.default_rng(config.seed)
        w = w * Field(grid, 1.0 + jitter * _smooth_noise(grid, rng).values)
    w = _clip_nonnegative(w)

    report = SolveReport()
    try:
        a_cur = h1_norm_sq(w, tau)
        k, _ = _scalar_projection(w, a_cur, params)
    except UnscalableError as exc:
        report.collapsed = True
        report.message = f"degenerate initial field: {exc}"
        return w, report
    w = k * w
    a_cur = k * k * a_cur
    energy = level_factor * a_cur
    init_norm = l2_norm(w)

    step = config.step0
    best_residual = math.inf
    stall = 0
    for _ in range(config.max_iters + 1):
        wp = pointwise_power(w, p)
        nl = riesz_convolve(wp, alpha) * pointwise_power(w, p - 1.0)
        hw = helmholtz_apply(w, tau)
        residual_rel = l2_norm(hw - nl) / l2_norm(hw)
        report.residual_history.append(residual_rel)
        report.energy_history.append(energy)
        if residual_rel <= config.tol_residual:
            report.converged = True
            break
        if report.iterations >= config.max_iters:
            report.message = "maximum iterations reached"
            break
        if residual_rel < 0.999 * best_residual:
            best_residual = residual_rel
            stall = 0
        else:
            stall += 1
            if stall > _STALL_PATIENCE:
                report.message = "residual improvement stalled"
                break

        g = w - bessel_solve(nl, tau)
        slope = h1_norm_sq(g, tau)
        polish = slope <= _SLOPE_FLOOR_REL * abs(energy)
        accepted = False
        s = 1.0 if polish else step
        for _ in range(_MAX_BACKTRACKS):
            cand = _clip_nonnegative(w - s * g)
            if l2_norm(cand) < _COLLAPSE_REL * init_norm:
                report.collapsed = True
                report.message = "collapse to zero: step produced a vanishing iterate"
                break
            try:
                a_cand = h1_norm_sq(cand, tau)
                k, _ = _scalar_projection(cand, a_cand, params)
            except UnscalableError:
                report.collapsed = True
                report.message = "collapse to zero: trivial self-interaction"
                break
            trial_energy = level_factor * k * k * a_cand
            if polish or trial_energy <= energy - _ARMIJO * s * slope:
                w = k * cand
                energy = trial_energy
                if not polish:
                    step = min(config.step0, s / config.backtrack)
                accepted = True
                break
            s *= config.backtrack
        if report.collapsed:
            break
        if not accepted:
            report.message = "line search stalled"
            break
        report.iterations += 1

    report.final = scalar_energy_report(w, params)
    return w, report


def _scalar_projection(w: Field, a: float, params: ProblemParams) -> tuple[float, float]:
    """Nehari scale k for w given its precomputed weighted H1 norm a."""
    d = riesz_bilinear(
        pointwise_power(w, params.p), pointwise_power(w, params.p), params.alpha
    )
    if not (d > 0.0 and a > 0.0):
        raise UnscalableError(f"norm {a}, self-interaction {d}")
    return (a / d) ** (1.0 / (2.0 * (params.p - 1.0))), d


# -- coupled system -----------------------------------------------------------


_pair_projection = nehari_pair_scales_from


def _system_init(
    params: ProblemParams,
    grid: Grid,
    config: SolveConfig,
    init_asymmetry: float,
    init_fields: tuple[Field, Field] | None,
    jitter: float,
    dipole: float | None,
) -> tuple[Field, Field]:
    """Initial pair (g, (1+asymmetry) g (1+dipole)) from a centered Gaussian g.

    The odd dipole factor keeps the start from being mirror symmetric, so
    the symmetric answer cannot be an artifact of the initialization; with
    asymmetry 0 the start is exactly (g, g).  ``dipole=None`` ties the dipole
    to the asymmetry switch.
    """
    if init_fields is not None:
        u, v = init_fields
        return _clip_nonnegative(u), _clip_nonnegative(v)
    g = gaussian_bump(grid)
    u = g
    v = (1.0 + init_asymmetry) * g
    if dipole is None:
        dipole = _DIPOLE_AMPLITUDE if init_asymmetry != 0.0 else 0.0
    if dipole != 0.0:
        x1 = grid.meshgrid()[0]
        factor = Field(
            grid,
            np.broadcast_to(1.0 + dipole * np.sin(np.pi * x1 / grid.L), grid.shape).copy(),
        )
        v = v * factor
    if jitter != 0.0:
        rng = np.random.default_rng(config.seed)
        u = u * Field(grid, 1.0 + jitter * _smooth_noise(grid, rng).values)
        v = v * Field(grid, 1.0 + jitter * _smooth_noise(grid, rng).values)
    return _clip_nonnegative(u), _clip_nonnegative(v)


def solve_system(
    params: ProblemParams,
    grid: Grid,
    config: SolveConfig,
    init_asymmetry: float = 0.0,
    init_fields: tuple[Field, Field] | None = None,
    jitter: float = 0.0,
    dipole: float | None = None,
) -> tuple[Field, Field, SolveReport]:
    """Ground state of the coupled system by projected descent.

    The default initialization is (g, (1+asymmetry) g (1+dipole)) with a
    centered Gaussian g and an odd dipole factor, so that the symmetric
    answer u = v is not baked in; asymmetry 0 starts exactly symmetric.
    Every iterate satisfies both Nehari identities by construction.
    """
    _require_h1(params)
    p, q, tau, eta, alpha = params.p, params.q, params.tau, params.eta, params.alpha
    cp = 2.0 * p / (p + q)
    cq = 2.0 * q / (p + q)
    level_factor = 0.5 - 1.0 / (p + q)

    u, v = _system_init(params, grid, config, init_asymmetry, init_fields, jitter, dipole)
    report = SolveReport()
    try:
        a = h1_norm_sq(u, tau)
        b = h1_norm_sq(v, eta)
        b0 = riesz_bilinear(pointwise_power(u, p), pointwise_power(v, q), alpha)
        s_sc, t_sc = _pair_projection(a, b, b0, params)
    except UnscalableError as exc:
        report.collapsed = True
        report.message = f"degenerate initial pair: {exc}"
        return u, v, report
    u, v = s_sc * u, t_sc * v
    energy = level_factor * (s_sc * s_sc * a + t_sc * t_sc * b)
    init_norm = l2_norm(u) + l2_norm(v)

    step = config.step0
    best_residual = math.inf
    stall = 0
    for _ in range(config.max_iters + 1):
        up = pointwise_power(u, p)
        vq = pointwise_power(v, q)
        nl_u = cp * riesz_convolve(vq, alpha) * pointwise_power(u, p - 1.0)
        nl_v = cq * riesz_convolve(up, alpha) * pointwise_power(v, q - 1.0)
        hu = helmholtz_apply(u, tau)
        hv = helmholtz_apply(v, eta)
        residual_rel = (l2_norm(hu - nl_u) + l2_norm(hv - nl_v)) / (l2_norm(hu) + l2_norm(hv))
        report.residual_history.append(residual_rel)
        report.energy_history.append(energy)
        if residual_rel <= config.tol_residual:
            report.converged = True
            break
        if report.iterations >= config.max_iters:
            report.message = "maximum iterations reached"
            break
        if residual_rel < 0.999 * best_residual:
            best_residual = residual_rel
            stall = 0
        else:
            stall += 1
            if stall > _STALL_PATIENCE:
                report.message = "residual improvement stalled"
                break

        gu = u - bessel_solve(nl_u, tau)
        gv = v - bessel_solve(nl_v, eta)
        slope = h1_norm_sq(gu, tau) + h1_norm_sq(gv, eta)
        polish = slope <= _SLOPE_FLOOR_REL * abs(energy)
        accepted = False
        s = 1.0 if polish else step
        for _ in range(_MAX_BACKTRACKS):
            cand_u = _clip_nonnegative(u - s * gu)
            cand_v = _clip_nonnegative(v - s * gv)
            if l2_norm(cand_u) + l2_norm(cand_v) < _COLLAPSE_REL * init_norm:
                report.collapsed = True
                report.message = "collapse to zero: step produced a vanishing iterate"
                break
            try:
                a = h1_norm_sq(cand_u, tau)
                b = h1_norm_sq(cand_v, eta)
                b0 = riesz_bilinear(
                    pointwise_power(cand_u, p), pointwise_power(cand_v, q), alpha
                )
                s_sc, t_sc = _pair_projection(a, b, b0, params)
            except UnscalableError:
                report.collapsed = True
                report.message = "collapse to zero: trivial coupling"
                break
            trial_energy = level_factor * (s_sc * s_sc * a + t_sc * t_sc * b)
            if polish or trial_energy <= energy - _ARMIJO * s * slope:
                u, v = s_sc * cand_u, t_sc * cand_v
                energy = trial_energy
                if not polish:
                    step = min(config.step0, s / config.backtrack)
                accepted = True
                break
            s *= config.backtrack
        if report.collapsed:
            break
        if not accepted:
            report.message = "line search stalled"
            break
        report.iterations += 1

    report.final = pair_energy_report(u, v, params)
    return u, v, report


# -- Picard iteration ---------------------------------------------------------


def picard_step(u: Field, v: Field, params: ProblemParams) -> tuple[Field, Field]:
    """One application of the integral fixed-point map:

    u+ = (2p/(p+q)) (-Lap+tau)^-1 (phi_v u^(p-1)),
    v+ = (2q/(p+q)) (-Lap+eta)^-1 (psi_u v^(q-1)),

    with phi_v = I_alpha*|v|^q and psi_u = I_alpha*|u|^p.  Exact solutions are
    fixed points; nonnegative inputs map to nonnegative outputs because the
    resolvent kernel is positive.
    """
    nl_u, nl_v = _nonlinear_terms(u, v, params)
    return bessel_solve(nl_u, params.tau), bessel_solve(nl_v, params.eta)


def solve_picard(
    params: ProblemParams,
    grid: Grid,
    config: SolveConfig,
    rescale: bool = True,
    init_asymmetry: float = 0.0,
    init_fields: tuple[Field, Field] | None = None,
    jitter: float = 0.0,
    dipole: float | None = None,
) -> tuple[Field, Field, SolveReport]:
    """Fixed-point iteration of the integral identities, Nehari-rescaled.

    The bare map is homogeneous of degree p+q-2 > 1 around zero, so without
    rescaling it contracts small states toward zero; the per-step Nehari
    rescale removes that instability.  ``rescale=False`` exists to expose the
    collapse mode, which the report flags instead of claiming convergence.
    The residual is the relative displacement |u+-u| + |v+-v| after rescaling.
    """
    _require_h1(params)
    u, v = _system_init(params, grid, config, init_asymmetry, init_fields, jitter, dipole)
    report = SolveReport()
    if rescale:
        try:
            a = h1_norm_sq(u, params.tau)
            b = h1_norm_sq(v, params.eta)
            b0 = riesz_bilinear(
                pointwise_power(u, params.p), pointwise_power(v, params.q), params.alpha
            )
            s_sc, t_sc = _pair_projection(a, b, b0, params)
            u, v = s_sc * u, t_sc * v
        except UnscalableError as exc:
            report.collapsed = True
            report.message = f"degenerate initial pair: {exc}"
            return u, v, report
    init_norm = l2_norm(u) + l2_norm(v)

    for _ in range(config.max_iters):
        un, vn = picard_step(u, v, params)
        if rescale:
            try:
                a = h1_norm_sq(un, params.tau)
                b = h1_norm_sq(vn, params.eta)
                b0 = riesz_bilinear(
                    pointwise_power(un, params.p), pointwise_power(vn, params.q), params.alpha
                )
                s_sc, t_sc = _pair_projection(a, b, b0, params)
            except UnscalableError:
                report.collapsed = True
                report.message = "collapse to zero: trivial coupling"
                break
            un, vn = s_sc * un, t_sc * vn
        displacement = (l2_norm(un - u) + l2_norm(vn - v)) / (l2_norm(u) + l2_norm(v))
        u, v = un, vn
        report.iterations += 1
        report.residual_history.append(displacement)
        report.energy_history.append(action_general(u, v, params))
        if l2_norm(u) + l2_norm(v) < _COLLAPSE_REL * init_norm:
            report.collapsed = True
            report.message = "collapse to zero: iterates contracted away"
            break
        if displacement <= config.tol_residual:
            report.converged = True
            break
        if not rescale and l2_norm(u) + l2_norm(v) < 1e-6 * init_norm:
            report.collapsed = True
            report.message = "collapse detected: unrescaled iteration is contracting to zero"
            break

    report.final = pair_energy_report(u, v, params)
    return u, v, report
