"""Exponent hypotheses, Hölder-type exponent pairs, and the Riesz normalization constant.

Everything here is plain arithmetic on the problem parameters: no grids, no
fields.  All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gamma

__all__ = [
    "ProblemParams",
    "ThetaPair",
    "Verdict",
    "InfeasibleThetaError",
    "check_h1",
    "check_h2",
    "find_thetas",
    "riesz_constant",
]


class InfeasibleThetaError(RuntimeError):
    """The admissibility check passed but the exponent-pair interval is empty.

    This cannot happen for correct arithmetic (admissibility guarantees a
    nonempty interval); it exists purely as an implementation-bug guard.
    """


@dataclass(frozen=True)
class ProblemParams:
    """Dimension, Riesz order, nonlinearity exponents, and frequencies.

    The critical exponents ``two_star`` and ``two_alpha_star`` are always
    recomputed from (N, alpha); for N in {1, 2} they are genuinely unbounded
    and reported as ``math.inf`` (exact, not a sentinel).
    """

    N: int
    alpha: float
    p: float
    q: float
    tau: float = 1.0
    eta: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.N, int) or self.N < 1:
            raise ValueError(f"N must be an integer >= 1, got {self.N!r}")
        if not 0.0 < self.alpha < self.N:
            raise ValueError(f"alpha must satisfy 0 < alpha < N, got alpha={self.alpha}, N={self.N}")
        if not self.p > 1.0:
            raise ValueError(f"p must be > 1, got {self.p}")
        if not self.q > 1.0:
            raise ValueError(f"q must be > 1, got {self.q}")
        if not self.tau > 0.0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if not self.eta > 0.0:
            raise ValueError(f"eta must be > 0, got {self.eta}")

    @property
    def two_star(self) -> float:
        """Critical Sobolev exponent: 2N/(N-2) for N >= 3, unbounded below."""
        if self.N <= 2:
            return math.inf
        return 2.0 * self.N / (self.N - 2)

    @property
    def two_alpha_star(self) -> float:
        """Upper critical exponent for the nonlocal term: 2(N+alpha)/(N-2) for N >= 3."""
        if self.N <= 2:
            return math.inf
        return 2.0 * (self.N + self.alpha) / (self.N - 2)

    @property
    def symmetric(self) -> bool:
        """True when the pair problem collapses to the scalar one (p = q, tau = eta)."""
        return self.p == self.q and self.tau == self.eta


@dataclass(frozen=True)
class Verdict:
    """Outcome of an admissibility check: overall flag plus named failures."""

    ok: bool
    violated: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def check_h1(params: ProblemParams) -> Verdict:
    """First admissibility gate: subcritical exponents with a nonlocal window.

    Requires max{1, 2*alpha/N} < p, q < 2* together with
    2(N+alpha)/N < p+q < 2_alpha^*.  Strict inequalities are evaluated
    exactly in floating point; boundary values fail.
    """
    lower = max(1.0, 2.0 * params.alpha / params.N)
    two_star = params.two_star
    sum_lower = 2.0 * (params.N + params.alpha) / params.N
    violated = []
    if not lower < params.p:
        violated.append("p_lower")
    if not params.p < two_star:
        violated.append("p_upper")
    if not lower < params.q:
        violated.append("q_lower")
    if not params.q < two_star:
        violated.append("q_upper")
    if not sum_lower < params.p + params.q:
        violated.append("sum_lower")
    if not params.p + params.q < params.two_alpha_star:
        violated.append("sum_upper")
    return Verdict(not violated, tuple(violated))


def check_h2(params: ProblemParams) -> Verdict:
    """Second admissibility gate: the symmetry-theorem hypothesis set.

    Requires 2 <= p, q < 2* and p+q < 2_alpha^*.  This strengthens the first
    gate by the technical restriction p, q >= 2.
    """
    two_star = params.two_star
    violated = []
    if not 2.0 <= params.p:
        violated.append("p_lower")
    if not params.p < two_star:
        violated.append("p_upper")
    if not 2.0 <= params.q:
        violated.append("q_lower")
    if not params.q < two_star:
        violated.append("q_upper")
    if not params.p + params.q < params.two_alpha_star:
        violated.append("sum_upper")
    return Verdict(not violated, tuple(violated))


@dataclass(frozen=True)
class ThetaPair:
    """Hölder-type exponent pair used to control the nonlocal coupling."""

    theta1: float
    theta2: float

    def validate(self, params: ProblemParams, rtol: float = 1e-12) -> None:
        """Raise ValueError unless the pair satisfies all its constraints."""
        n_over_alpha = params.N / params.alpha
        for name, theta in (("theta1", self.theta1), ("theta2", self.theta2)):
            if not 1.0 < theta < n_over_alpha:
                raise ValueError(f"{name}={theta} outside (1, N/alpha)=(1, {n_over_alpha})")
        target = (params.N + params.alpha) / params.N
        total = 1.0 / self.theta1 + 1.0 / self.theta2
        if abs(total - target) > rtol * target:
            raise ValueError(f"1/theta1 + 1/theta2 = {total} != (N+alpha)/N = {target}")
        if not 2.0 < self.theta1 * params.p < params.two_star:
            raise ValueError(f"theta1*p = {self.theta1 * params.p} outside (2, 2*)")
        if not 2.0 < self.theta2 * params.q < params.two_star:
            raise ValueError(f"theta2*q = {self.theta2 * params.q} outside (2, 2*)")


def theta_feasibility_interval(params: ProblemParams) -> tuple[float, float]:
    """Open interval of s = 1/theta1 values compatible with all constraints.

    With 1/theta2 = (N+alpha)/N - s, the requirements theta1, theta2 in
    (1, N/alpha), 2 < theta1*p < 2*, and 2 < theta2*q < 2* translate into
    strict bounds on s; this returns (lo, hi) of their intersection.
    """
    ratio = (params.N + params.alpha) / params.N
    lo = max(params.alpha / params.N, ratio - 1.0, ratio - params.q / 2.0)
    hi = min(1.0, params.p / 2.0, ratio - params.alpha / params.N)
    if math.isfinite(params.two_star):
        lo = max(lo, params.p / params.two_star)
        hi = min(hi, ratio - params.q / params.two_star)
    return lo, hi


def find_thetas(params: ProblemParams) -> ThetaPair:
    """Deterministic exponent-pair choice: midpoint of the feasibility interval.

    Existence of the pair is guaranteed by the first admissibility gate; only
    the selection rule (midpoint) is a choice made here, since any admissible
    pair works downstream.
    """
    verdict = check_h1(params)
    if not verdict:
        raise ValueError(f"admissibility (first gate) fails: {', '.join(verdict.violated)}")
    lo, hi = theta_feasibility_interval(params)
    if not lo < hi:
        raise InfeasibleThetaError(
            f"empty feasibility interval ({lo}, {hi}) despite admissible parameters"
        )
    s = 0.5 * (lo + hi)
    pair = ThetaPair(theta1=1.0 / s, theta2=1.0 / ((params.N + params.alpha) / params.N - s))
    pair.validate(params)
    return pair


def riesz_constant(N: int, alpha: float) -> float:
    """Normalization constant of the Riesz kernel A(N, alpha) / |x|^(N-alpha).

    A(N, alpha) = Gamma((N-alpha)/2) / (Gamma(alpha/2) * pi^(N/2) * 2^alpha),
    which makes the kernel the inverse Fourier transform of |k|^(-alpha) under
    the angular-frequency convention.
    """
    if not 0.0 < alpha < N:
        raise ValueError(f"alpha must satisfy 0 < alpha < N, got alpha={alpha}, N={N}")
    return float(
        gamma((N - alpha) / 2.0) / (gamma(alpha / 2.0) * math.pi ** (N / 2.0) * 2.0**alpha)
    )
