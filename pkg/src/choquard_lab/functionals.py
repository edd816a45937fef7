"""Variational objects: PDE residuals, actions, quotient, and Nehari algebra.

The coupled system under study is

    (-Lap + tau) u = (2p/(p+q)) (I_alpha * |v|^q) |u|^(p-2) u,
    (-Lap + eta) v = (2q/(p+q)) (I_alpha * |u|^p) |v|^(q-2) v,

whose critical points are exactly those of the pair action implemented by
``action_general``.  For p = q, tau = eta everything reduces to the symmetric
pair action and to the scalar equation (-Lap + tau) w = (I_alpha*|w|^p)|w|^(p-2)w.

Swap discipline: for p = q, tau = eta every function here is implemented so
that exchanging (u, v) produces the exactly exchanged result in floating
point (coupling integrals are evaluated through the bit-symmetric spectral
bilinear form, and norm sums are combined commutatively).  The solvers rely
on this for their equivariance contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .grid import Field, h1_norm_sq, pointwise_power
from .params import ProblemParams
from .potentials import bessel_solve, helmholtz_apply, riesz_bilinear, riesz_convolve

__all__ = [
    "EnergyReport",
    "UnscalableError",
    "coupling_integral",
    "residual_system",
    "residual_scalar",
    "action_J",
    "action_general",
    "scalar_action",
    "scalar_quotient",
    "self_interaction",
    "nehari_defects",
    "nehari_scale",
    "nehari_scale_pair",
    "nehari_pair_scales_from",
    "scalar_nehari_scale",
    "scalar_energy_report",
    "pair_energy_report",
]


class UnscalableError(RuntimeError):
    """Nehari projection is undefined: the coupling integral is not positive.

    For nonzero nonnegative fields the coupling is strictly positive, so this
    signals collapse to zero or disjointly-supported trivial coupling.
    """


def _require_symmetric(params: ProblemParams, what: str) -> None:
    if not params.symmetric:
        raise ValueError(f"{what} requires p = q and tau = eta, got p={params.p}, q={params.q}, tau={params.tau}, eta={params.eta}")


def coupling_integral(u: Field, v: Field, params: ProblemParams) -> float:
    """Nonlocal coupling  integral (I_alpha * |u|^p) |v|^q.

    Symmetric under (u,p) <-> (v,q) exchange by kernel symmetry; evaluated
    through the spectral bilinear form so the symmetry is exact in floats.
    """
    up = pointwise_power(u, params.p)
    vq = pointwise_power(v, params.q)
    return riesz_bilinear(up, vq, params.alpha)


def self_interaction(w: Field, params: ProblemParams) -> float:
    """Nonlocal self-interaction  integral (I_alpha * |w|^p) |w|^p  (>= 0)."""
    wp = pointwise_power(w, params.p)
    return riesz_bilinear(wp, wp, params.alpha)


def _nonlinear_terms(u: Field, v: Field, params: ProblemParams) -> tuple[Field, Field]:
    """Right-hand sides of both equations, including their coefficients."""
    p, q = params.p, params.q
    weight = pointwise_power(v, q)
    phi_v = riesz_convolve(weight, params.alpha)
    psi_u = riesz_convolve(pointwise_power(u, p), params.alpha)
    nl_u = (2.0 * p / (p + q)) * phi_v * pointwise_power(u, p - 1.0, signed=True)
    nl_v = (2.0 * q / (p + q)) * psi_u * pointwise_power(v, q - 1.0, signed=True)
    return nl_u, nl_v


def residual_system(u: Field, v: Field, params: ProblemParams) -> tuple[Field, Field]:
    """Pointwise residuals of both equations of the coupled system."""
    nl_u, nl_v = _nonlinear_terms(u, v, params)
    r1 = helmholtz_apply(u, params.tau) - nl_u
    r2 = helmholtz_apply(v, params.eta) - nl_v
    return r1, r2


def residual_scalar(w: Field, params: ProblemParams) -> Field:
    """Residual (-Lap + tau) w - (I_alpha * |w|^p)|w|^(p-2) w of the scalar equation."""
    _require_symmetric(params, "the scalar equation")
    nl = riesz_convolve(pointwise_power(w, params.p), params.alpha) * pointwise_power(
        w, params.p - 1.0, signed=True
    )
    return helmholtz_apply(w, params.tau) - nl


def action_J(u: Field, v: Field, params: ProblemParams) -> float:
    """Symmetric pair action (p = q, tau = eta):

    J(u, v) = 1/2 integral |grad u|^2 + |grad v|^2 + tau (u^2 + v^2)
              - (1/p) integral (I_alpha * |u|^p) |v|^p.
    """
    _require_symmetric(params, "the symmetric pair action")
    quad = 0.5 * (h1_norm_sq(u, params.tau) + h1_norm_sq(v, params.tau))
    return quad - coupling_integral(u, v, params) / params.p


def action_general(u: Field, v: Field, params: ProblemParams) -> float:
    """Pair action whose critical points satisfy the coupled system:

    1/2 (|u|_{tau}^2 + |v|_{eta}^2) - (2/(p+q)) integral (I_alpha*|u|^p)|v|^q.

    Reduces to the symmetric pair action when p = q, tau = eta, since then
    2/(p+q) = 1/p.
    """
    quad = 0.5 * (h1_norm_sq(u, params.tau) + h1_norm_sq(v, params.eta))
    return quad - (2.0 / (params.p + params.q)) * coupling_integral(u, v, params)


def scalar_action(w: Field, params: ProblemParams) -> float:
    """Scalar action  1/2 |w|_{tau}^2 - (1/2p) integral (I_alpha*|w|^p)|w|^p."""
    _require_symmetric(params, "the scalar action")
    return 0.5 * h1_norm_sq(w, params.tau) - self_interaction(w, params) / (2.0 * params.p)


def scalar_quotient(w: Field, params: ProblemParams) -> float:
    """Rayleigh-type quotient  Q(w) = |w|_{tau}^2 / D(w)^(1/p), D = self-interaction.

    Invariant under rescaling of w (degrees 2 and 2p cancel); undefined at
    w = 0, which raises UnscalableError.
    """
    _require_symmetric(params, "the scalar quotient")
    d = self_interaction(w, params)
    if not d > 0.0:
        raise UnscalableError(f"degenerate input: self-interaction = {d}")
    return h1_norm_sq(w, params.tau) / d ** (1.0 / params.p)


def nehari_defects(u: Field, v: Field, params: ProblemParams) -> tuple[float, float]:
    """Constraint values (F1, F2) of the two-sided Nehari manifold:

    F1 = |u|_{tau}^2 - integral (I_alpha*|v|^p)|u|^p,   F2 symmetrically.

    (u, v) belongs to the manifold iff both are nonzero and F1 = F2 = 0.
    """
    _require_symmetric(params, "the two-sided Nehari constraint")
    return _nehari_defects_general(u, v, params)


def _nehari_defects_general(u: Field, v: Field, params: ProblemParams) -> tuple[float, float]:
    """Nehari identities of the general system, testing each equation on itself.

    Coefficients 2p/(p+q) and 2q/(p+q) reduce to 1 when p = q.
    """
    p, q = params.p, params.q
    up = pointwise_power(u, p)
    vq = pointwise_power(v, q)
    b0 = riesz_bilinear(up, vq, params.alpha)
    f1 = h1_norm_sq(u, params.tau) - (2.0 * p / (p + q)) * b0
    f2 = h1_norm_sq(v, params.eta) - (2.0 * q / (p + q)) * b0
    return f1, f2


def nehari_scale(u: Field, v: Field, params: ProblemParams) -> float:
    """Unique t > 0 placing (t u, t v) on the Nehari manifold of the pair action.

    By homogeneity  t = (|(u,v)|^2 / (2 Dtilde))^(1/(p+q-2)) with
    Dtilde = integral (I_alpha*|u|^p)|v|^q.
    """
    d = coupling_integral(u, v, params)
    if not d > 0.0:
        raise UnscalableError(f"coupling integral = {d}; pair cannot be scaled onto the manifold")
    norm_sq = h1_norm_sq(u, params.tau) + h1_norm_sq(v, params.eta)
    return (norm_sq / (2.0 * d)) ** (1.0 / (params.p + params.q - 2.0))


def nehari_pair_scales_from(a: float, b: float, b0: float, params: ProblemParams) -> tuple[float, float]:
    """Two-sided Nehari scales from precomputed norms a, b and raw coupling b0.

    Solving s^2 A = s^p t^q C and t^2 B = s^p t^q D in log form gives

        ln s = ((2-q) ln(C/A) + q ln(D/B)) / (4 - 2p - 2q),
        ln t = ((2-p) ln(D/B) + p ln(C/A)) / (4 - 2p - 2q),

    where A, B are the weighted H1 norms and C, D the coupling integral b0
    carrying the respective equation coefficients 2p/(p+q), 2q/(p+q).  The
    formulas are literal mirror images, so exchanging (u, v) exchanges (s, t)
    exactly in floating point when p = q.
    """
    p, q = params.p, params.q
    c = (2.0 * p / (p + q)) * b0
    d = (2.0 * q / (p + q)) * b0
    if not (c > 0.0 and d > 0.0 and a > 0.0 and b > 0.0):
        raise UnscalableError(f"degenerate pair: norms ({a}, {b}), couplings ({c}, {d})")
    det = 4.0 - 2.0 * p - 2.0 * q
    log_ca = math.log(c / a)
    log_db = math.log(d / b)
    s = math.exp(((2.0 - q) * log_ca + q * log_db) / det)
    t = math.exp(((2.0 - p) * log_db + p * log_ca) / det)
    return s, t


def nehari_scale_pair(u: Field, v: Field, params: ProblemParams) -> tuple[float, float]:
    """Scales (s, t) placing (s u, t v) on both Nehari constraints at once."""
    a = h1_norm_sq(u, params.tau)
    b = h1_norm_sq(v, params.eta)
    b0 = riesz_bilinear(
        pointwise_power(u, params.p), pointwise_power(v, params.q), params.alpha
    )
    return nehari_pair_scales_from(a, b, b0, params)


def scalar_nehari_scale(w: Field, params: ProblemParams) -> float:
    """Unique k > 0 with k w on the scalar Nehari manifold:

    k = (|w|_{tau}^2 / D(w))^(1/(2(p-1))).
    """
    _require_symmetric(params, "the scalar Nehari projection")
    d = self_interaction(w, params)
    if not d > 0.0:
        raise UnscalableError(f"degenerate input: self-interaction = {d}")
    return (h1_norm_sq(w, params.tau) / d) ** (1.0 / (2.0 * (params.p - 1.0)))


@dataclass(frozen=True)
class EnergyReport:
    """Energies, constraint defects, and level estimates for one state.

    Levels carry the _est suffix: they are values at converged numerical
    minimizers, never certified infima.  Fields not meaningful for a given
    run kind (scalar vs pair) are None.
    """

    j: float | None = None
    a_scalar: float | None = None
    q: float | None = None
    f1: float | None = None
    f2: float | None = None
    a: float | None = None
    b: float | None = None
    s_est: float | None = None
    t_est: float | None = None
    c_est: float | None = None

    def to_dict(self) -> dict:
        return {
            "j": self.j,
            "a_scalar": self.a_scalar,
            "q": self.q,
            "f1": self.f1,
            "f2": self.f2,
            "a": self.a,
            "b": self.b,
            "s_est": self.s_est,
            "t_est": self.t_est,
            "c_est": self.c_est,
        }


def scalar_energy_report(w: Field, params: ProblemParams) -> EnergyReport:
    """Energy ledger of a scalar state, viewed also as the diagonal pair (w, w)."""
    d = self_interaction(w, params)
    f1, f2 = _nehari_defects_general(w, w, params)
    s_est = t_est = None
    if d > 0.0:
        s_est = scalar_quotient(w, params)
        k = scalar_nehari_scale(w, params)
        t_est = scalar_action(k * w, params)
    return EnergyReport(
        j=action_J(w, w, params),
        a_scalar=scalar_action(w, params),
        q=s_est,
        f1=f1,
        f2=f2,
        a=d,
        b=d,
        s_est=s_est,
        t_est=t_est,
    )


def pair_energy_report(
    u: Field, v: Field, params: ProblemParams, s_est: float | None = None
) -> EnergyReport:
    """Energy ledger of a pair state; positivity of a and b is structural."""
    j = action_general(u, v, params)
    f1, f2 = _nehari_defects_general(u, v, params)
    up = pointwise_power(u, params.p)
    vq = pointwise_power(v, params.q)
    return EnergyReport(
        j=j,
        f1=f1,
        f2=f2,
        a=riesz_bilinear(up, up, params.alpha),
        b=riesz_bilinear(vq, vq, params.alpha),
        s_est=s_est,
        c_est=j,
    )
