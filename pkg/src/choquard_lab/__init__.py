"""Pseudospectral ground states of coupled Choquard-type systems.

Solves the coupled system

    (-Lap + tau) u = (2p/(p+q)) (I_alpha * |v|^q) |u|^(p-2) u,
    (-Lap + eta) v = (2q/(p+q)) (I_alpha * |u|^p) |v|^(q-2) v,

and its scalar reduction on a truncated periodic box, and numerically
certifies the structural facts about the computed states: exponent
admissibility, nonlocal inequalities, integral fixed-point identities,
Nehari and energy-level relations, radial symmetry, and the u = v
classification of pair ground states.
"""

from .analysis import (
    Check,
    ReflectionSpec,
    VerifyReport,
    classification_report,
    radial_deviation,
    radialize,
    recenter,
    recenter_fine,
    reflection_check,
    region_plot_data,
    run_verification,
    tau_rescale,
)
from .functionals import (
    EnergyReport,
    UnscalableError,
    action_J,
    action_general,
    coupling_integral,
    nehari_defects,
    nehari_scale,
    nehari_scale_pair,
    residual_system,
    scalar_action,
    scalar_nehari_scale,
    scalar_quotient,
    self_interaction,
)
from .grid import Field, Grid, h1_norm_sq, integrate, l2_norm, pointwise_power, read_field, write_field
from .params import (
    ProblemParams,
    ThetaPair,
    Verdict,
    check_h1,
    check_h2,
    find_thetas,
    riesz_constant,
)
from .potentials import bessel_solve, helmholtz_apply, riesz_bilinear, riesz_convolve
from .solvers import (
    SolveConfig,
    SolveReport,
    gaussian_bump,
    picard_step,
    solve_picard,
    solve_scalar,
    solve_system,
)

__all__ = [
    "Check",
    "EnergyReport",
    "Field",
    "Grid",
    "ProblemParams",
    "ReflectionSpec",
    "SolveConfig",
    "SolveReport",
    "ThetaPair",
    "UnscalableError",
    "Verdict",
    "VerifyReport",
    "action_J",
    "action_general",
    "bessel_solve",
    "check_h1",
    "check_h2",
    "classification_report",
    "coupling_integral",
    "find_thetas",
    "gaussian_bump",
    "h1_norm_sq",
    "helmholtz_apply",
    "integrate",
    "l2_norm",
    "nehari_defects",
    "nehari_scale",
    "nehari_scale_pair",
    "picard_step",
    "pointwise_power",
    "radial_deviation",
    "radialize",
    "read_field",
    "recenter",
    "recenter_fine",
    "reflection_check",
    "region_plot_data",
    "residual_system",
    "riesz_bilinear",
    "riesz_constant",
    "riesz_convolve",
    "run_verification",
    "scalar_action",
    "scalar_nehari_scale",
    "scalar_quotient",
    "self_interaction",
    "solve_picard",
    "solve_scalar",
    "solve_system",
    "tau_rescale",
    "write_field",
]

__version__ = "0.1.0"
