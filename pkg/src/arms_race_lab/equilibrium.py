"""Best responses, the interior equilibrium and the provocation threshold.

At an interior defender optimum the first-order condition pins the contest
denominator to ``Phi(a) = sqrt(V q0 (1 - q0) h delta s / c_d)``, which gives
the defender's best response in closed form.  The attacker's best response
has no closed form (and jumps when the fixed adoption cost ``F`` is
positive), so it is found numerically.

The equilibrium is the fixed point ``a = a_BR(d_BR(a))`` of the composed best
responses.  Substituting ``d_BR`` into the attacker's payoff and maximizing
(the "reduced" objective) yields the attacker-leads solution instead, so
the reduced objective is kept only as a concavity diagnostic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from ._optimize import maximize, scan_grid
from .contest import (
    ModelParams,
    attacker_marginal,
    breach_probability,
    defender_marginal,
)
from .errors import CornerBranchError, DomainError
from .ratio import r_general

SECOND_DIFF_TOL = 1e-10
UNIQUENESS_SCAN_POINTS = 2048
FIXED_POINT_TOL = 1e-9
PROVOCATION_SCAN_POINTS = 257
PROVOCATION_BRACKET_FACTOR = 10.0


# -- defender ---------------------------------------------------------------

def _phi_interior(p: ModelParams, a, s_eff):
    return np.sqrt(p.V * p.q0 * (1.0 - p.q0) * p.h.value(a) * p.delta.value(a) * s_eff / p.c_d)


def defender_interior_response(p: ModelParams, a, s_eff):
    """Unclamped closed-form ``d*(a)``; negative where the corner binds."""
    h = p.h.value(a)
    dl = p.delta.value(a)
    if np.any(dl == 0):
        raise CornerBranchError("defender effectiveness underflowed to zero")
    phi = _phi_interior(p, a, s_eff)
    return (phi - p.q0 * h - (1.0 - p.q0)) / ((1.0 - p.q0) * dl * s_eff)


def defender_best_response(p: ModelParams, a, s_eff) -> float:
    if a < 0:
        raise DomainError(f"a must be >= 0, got {a!r}")
    if not s_eff > 0:
        raise DomainError(f"s_eff must be > 0, got {s_eff!r}")
    return max(0.0, float(defender_interior_response(p, a, s_eff)))


def interior_breach(p: ModelParams, a, s_eff) -> float:
    """Breach probability on the defender's interior branch."""
    if not defender_interior_response(p, a, s_eff) > 0:
        raise CornerBranchError(f"defender best response is clamped to 0 at a={a!r}")
    return math.sqrt(p.q0 * p.c_d * p.h.value(a) / (p.V * (1.0 - p.q0) * p.delta.value(a) * s_eff))


def reduced_attacker_objective(p: ModelParams, a, s_eff) -> float:
    return p.B * interior_breach(p, a, s_eff) - p.c_a * a


# -- attacker ---------------------------------------------------------------

@dataclass(frozen=True)
class AttackerResponse:
    a: float
    adopts: bool
    candidate: float
    adoption_gain: float


def attacker_response(p: ModelParams, d, s_eff) -> AttackerResponse:
    """Attacker best response with the adoption comparison exposed.

    ``candidate`` maximizes the continuous payoff ``B q - c_a a``;
    ``adoption_gain`` is its payoff net of ``F`` minus the payoff at a = 0.
    """
    if d < 0:
        raise DomainError(f"d must be >= 0, got {d!r}")
    ub = p.a_max
    status_quo = p.B * breach_probability(p, 0.0, d, s_eff)
    if ub == 0:
        return AttackerResponse(0.0, False, 0.0, -p.F)

    def payoff(a):
        return p.B * breach_probability(p, a, d, s_eff) - p.c_a * a

    def slope(a):
        return p.B * attacker_marginal(p, a, d, s_eff) - p.c_a

    best = maximize(payoff, 0.0, ub, grad=slope)
    gain = best.value - p.F - status_quo if best.x > 0 else -p.F
    adopts = best.x > 0 and gain > 0
    return AttackerResponse(best.x if adopts else 0.0, adopts, best.x, gain)


def attacker_best_response(p: ModelParams, d, s_eff) -> float:
    """Maximizes ``B q - c_a a - F 1[a > 0]`` over ``[0, B/c_a]``; ties go to 0."""
    return attacker_response(p, d, s_eff).a


# -- uniqueness -------------------------------------------------------------

@dataclass(frozen=True)
class UniquenessReport:
    certified: bool
    h_concave: bool
    erosion_condition: bool
    max_second_difference: float
    failed: tuple[str, ...] = ()


def uniqueness_check(p: ModelParams) -> UniquenessReport:
    """Sufficient conditions for at most one interior equilibrium.

    Both shipped amplification families are strictly concave for every
    admissible parameter.  The erosion condition ``delta delta'' >=
    2 delta'^2`` is decided per family.  A numeric scan of ``sqrt(h/delta)``
    then confirms concavity over ``[0, 4 B/c_a]``.
    """
    h_concave = True
    erosion_ok = p.delta.uniqueness_guarantee
    upper = 4.0 * p.a_max if p.a_max > 0 else 1.0
    a = np.linspace(0.0, upper, UNIQUENESS_SCAN_POINTS)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        f = np.sqrt(p.h.value(a) / p.delta.value(a))
        second = f[2:] - 2.0 * f[1:-1] + f[:-2]
    # nan (overflowed delta) counts as a failed scan
    max_second = float(np.nanmax(second)) if np.all(np.isfinite(second)) else math.inf
    numeric_ok = max_second <= SECOND_DIFF_TOL
    failed = []
    if not h_concave:
        failed.append("h_concave")
    if not erosion_ok:
        failed.append("erosion_condition")
    if not numeric_ok:
        failed.append("numeric_concavity")
    return UniquenessReport(not failed, h_concave, erosion_ok, max_second, tuple(failed))


# -- equilibrium ------------------------------------------------------------

@dataclass(frozen=True)
class EquilibriumResult:
    d_star: float
    a_star: float
    q_star: float
    r_at_eq: float
    interior_defender: bool
    interior_attacker: bool
    uniqueness_certified: bool
    iterations: int
    fixed_points: tuple[tuple[float, float], ...] = field(default=())
    method: str = "fixed_point"

    @property
    def interior(self) -> bool:
        return self.interior_defender and self.interior_attacker


def _composed_gap(p, s_eff):
    def gap(a):
        return attacker_best_response(p, defender_best_response(p, a, s_eff), s_eff) - a
    return gap


def _fixed_points(p: ModelParams, s_eff):
    """Roots of ``a_BR(d_BR(a)) - a`` on ``[0, B/c_a]``.

    Sign changes of the gap are refined by Brent's method and kept only
    if the gap vanishes there; a sign change across a jump of ``a_BR`` is
    not a fixed point.
    """
    gap = _composed_gap(p, s_eff)
    ub = p.a_max
    grid = scan_grid(0.0, ub) if ub > 0 else np.array([0.0])
    values = [gap(float(a)) for a in grid]
    evaluations = len(values)
    roots = []
    if values[0] == 0:
        roots.append(0.0)
    for i in range(len(grid) - 1):
        lo, hi = float(grid[i]), float(grid[i + 1])
        g_lo, g_hi = values[i], values[i + 1]
        if g_hi == 0 and hi > 0:
            roots.append(hi)
            continue
        if g_lo == 0 or (g_lo > 0) == (g_hi > 0):
            continue
        root, info = brentq(gap, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                            full_output=True, disp=False)
        evaluations += info.function_calls
        if abs(gap(root)) < FIXED_POINT_TOL * max(1.0, ub):
            roots.append(float(root))
    return roots, evaluations


def _assemble(p, s_eff, d, a, certified, iterations, fixed_points, method, force_corner=False):
    q = breach_probability(p, a, d, s_eff)
    interior_d = (not force_corner) and bool(defender_interior_response(p, a, s_eff) > 0)
    interior_a = (not force_corner) and 0 < a < p.a_max
    return EquilibriumResult(
        d_star=d, a_star=a, q_star=float(q), r_at_eq=r_general(p, a, d, s_eff).r_general,
        interior_defender=interior_d, interior_attacker=interior_a,
        uniqueness_certified=certified, iterations=iterations,
        fixed_points=tuple(fixed_points), method=method,
    )


def solve_equilibrium(p: ModelParams, s_eff=None) -> EquilibriumResult:
    """Pure-strategy Nash equilibrium of the single-surface game.

    When several fixed points exist the one with the smallest ``a`` is
    returned and all of them are listed in ``fixed_points``.  If no fixed
    point exists on the grid (the attacker's response jumps over the
    diagonal), the result comes from damped best-response iteration and both
    interior flags are false.
    """
    s_eff = p.s if s_eff is None else s_eff
    if not s_eff > 0:
        raise DomainError("solve_equilibrium requires s_eff > 0")
    certified = uniqueness_check(p).certified
    roots, evaluations = _fixed_points(p, s_eff)
    pairs = [(defender_best_response(p, a, s_eff), a) for a in roots]
    consistent = [
        (d, a) for d, a in pairs
        if abs(d - defender_best_response(p, a, s_eff)) < 1e-8
        and abs(a - attacker_best_response(p, d, s_eff)) < 1e-6
    ]
    if consistent:
        d, a = consistent[0]
        return _assemble(p, s_eff, d, a, certified, evaluations, consistent, "fixed_point")

    from .dynamics import simulate_discrete

    traj = simulate_discrete(p, s_eff, (0.0, 0.0))
    d, a = traj.d_path[-1], traj.a_path[-1]
    return _assemble(p, s_eff, d, a, certified, evaluations + traj.steps, pairs,
                     "damped_iteration", force_corner=True)


def foc_residuals(p: ModelParams, eq: EquilibriumResult, s_eff=None) -> tuple[float, float]:
    """(defender, attacker) first-order-condition residuals at ``eq``."""
    s_eff = p.s if s_eff is None else s_eff
    defender = p.V * defender_marginal(p, eq.a_star, eq.d_star, s_eff) - p.c_d
    attacker = p.B * attacker_marginal(p, eq.a_star, eq.d_star, s_eff) - p.c_a
    return float(defender), float(attacker)


# -- provocation threshold ----------------------------------------------------

class ProvocationStatus(str, Enum):
    THRESHOLD = "threshold"
    NEVER_ADOPTS = "never_adopts"
    ALWAYS_ADOPTS = "always_adopts"


@dataclass(frozen=True)
class ProvocationResult:
    status: ProvocationStatus
    d_hat: float | None = None
    nonmonotone: bool = False
    bracket_upper: float = 0.0


def adoption_gain(p: ModelParams, d, s_eff) -> float:
    return attacker_response(p, d, s_eff).adoption_gain


def provocation_threshold(p: ModelParams, s_eff=None) -> ProvocationResult:
    """Smallest defender investment at which AI adoption pays off for the attacker.

    The search bracket is ``[0, 10 V/c_d]``; the factor 10 leaves room for
    the erosion channel to peak beyond the defender's own rationality bound.
    """
    s_eff = p.s if s_eff is None else s_eff
    upper = PROVOCATION_BRACKET_FACTOR * p.d_max
    if p.F == 0:
        return ProvocationResult(ProvocationStatus.ALWAYS_ADOPTS, 0.0, False, upper)
    if p.F > p.B:
        return ProvocationResult(ProvocationStatus.NEVER_ADOPTS, None, False, upper)

    def gain(d):
        # adoption_gain is -F when the continuous optimum sits at a = 0
        return attacker_response(p, d, s_eff).adoption_gain

    grid = np.linspace(0.0, upper, PROVOCATION_SCAN_POINTS) if upper > 0 else np.array([0.0])
    values = np.array([gain(float(d)) for d in grid])
    adopt = values >= 0
    if not adopt.any():
        return ProvocationResult(ProvocationStatus.NEVER_ADOPTS, None, False, upper)
    nonmonotone = int(np.count_nonzero(adopt[1:] != adopt[:-1])) > 1
    first = int(np.argmax(adopt))
    if first == 0:
        return ProvocationResult(ProvocationStatus.THRESHOLD, 0.0, nonmonotone, upper)
    lo, hi = float(grid[first - 1]), float(grid[first])
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if gain(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return ProvocationResult(ProvocationStatus.THRESHOLD, hi, nonmonotone, upper)
