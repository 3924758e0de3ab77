"""Deterrence threshold and target selection across heterogeneous defenders.

The attacker chooses between a simple single-surface attack and a complex
attack spanning ``N_a`` surfaces.  The complex attack is more potent but its
footprint creates structural correlation ``gamma_a`` that a defender with
correlation capacity ``gamma_d`` can exploit: realized correlation is
``min(gamma_a, gamma_d)``.  The net benefit of complexity is the difference
of the attacker's optimized payoffs,

    dpi(gamma_d) = B (P_c - P_s) - c_a (a_c - a_s),

each side evaluated at its own optimal investment.  The fixed adoption cost
is excluded (it cancels when both strategies use AI).
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._optimize import maximize
from .contest import AmplificationSpec, ModelParams, attacker_marginal, breach_probability
from .errors import ComputationError, DegenerateSensitivityError, DomainError
from .multisurface import SurfaceConfig, effective_signal, multi_surface_state

MONOTONICITY_SCAN = 128
SENSITIVITY_AGREEMENT = 1e-3
DEGENERATE_SLOPE = 1e-12
_TEST_GRID = np.geomspace(1e-3, 1e3, 61)


class DefenderMode(str, Enum):
    FIXED = "fixed"
    BEST_RESPONSE = "best_response"


@dataclass(frozen=True)
class DeterrenceScenario:
    base: ModelParams
    d_fixed: float
    h_simple: AmplificationSpec
    h_complex: AmplificationSpec
    N_a: int = 4
    gamma_a: float = 1.0
    rho: float = 1.0
    simple_attack_diluted: bool = False
    defender_mode: DefenderMode = DefenderMode.FIXED

    def __post_init__(self):
        object.__setattr__(self, "defender_mode", DefenderMode(self.defender_mode))
        if not self.d_fixed >= 0:
            raise DomainError(f"d_fixed must be >= 0, got {self.d_fixed!r}")
        if int(self.N_a) != self.N_a or self.N_a < 1:
            raise DomainError(f"N_a must be a positive integer, got {self.N_a!r}")
        if not 0 < self.gamma_a <= 1:
            raise DomainError(f"gamma_a must lie in (0, 1], got {self.gamma_a!r}")
        if not 0 <= self.rho <= 1:
            raise DomainError(f"rho must lie in [0, 1], got {self.rho!r}")

    def validate_potency(self):
        """Complex amplification must dominate simple amplification for a > 0."""
        if self.N_a < 2:
            raise DomainError("the complex attack must span N_a >= 2 surfaces")
        if not np.all(self.h_complex.value(_TEST_GRID) > self.h_simple.value(_TEST_GRID)):
            raise DomainError("h_complex must exceed h_simple on the test grid")

    def replace(self, **changes) -> "DeterrenceScenario":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class AttackValue:
    a: float
    P: float
    payoff: float


def _optimize_attack(p: ModelParams, d, s_eff, N) -> AttackValue:
    """Attacker's best investment against ``N`` identical surfaces (no fixed cost)."""

    def breach(a):
        q = breach_probability(p, a, d, s_eff)
        return -np.expm1(N * np.log1p(-q))

    def payoff(a):
        return p.B * breach(a) - p.c_a * a

    def slope(a):
        q = breach_probability(p, a, d, s_eff)
        dP = N * math.exp((N - 1) * math.log1p(-q)) * attacker_marginal(p, a, d, s_eff)
        return p.B * dP - p.c_a

    best = maximize(payoff, 0.0, p.a_max, grad=slope)
    return AttackValue(best.x, float(breach(best.x)), best.value)


def _defender_investment(sc: DeterrenceScenario, params: ModelParams, s_eff):
    if sc.defender_mode is DefenderMode.FIXED:
        return sc.d_fixed
    from .equilibrium import solve_equilibrium

    return solve_equilibrium(params, s_eff).d_star


def complex_attack(sc: DeterrenceScenario, gamma_d) -> AttackValue:
    gamma = min(sc.gamma_a, gamma_d)
    params = sc.base.replace(h=sc.h_complex)
    cfg = SurfaceConfig(N=sc.N_a, rho=sc.rho, gamma=gamma, s=sc.base.s)
    s_eff = effective_signal(cfg)
    return _optimize_attack(params, _defender_investment(sc, params, s_eff), s_eff, sc.N_a)


def simple_attack(sc: DeterrenceScenario) -> AttackValue:
    params = sc.base.replace(h=sc.h_simple)
    s_eff = sc.base.s / sc.N_a**sc.rho if sc.simple_attack_diluted else sc.base.s
    return _optimize_attack(params, _defender_investment(sc, params, s_eff), s_eff, 1)


def delta_pi(sc: DeterrenceScenario, gamma_d) -> float:
    if not 0 <= gamma_d <= 1:
        raise DomainError(f"gamma_d must lie in [0, 1], got {gamma_d!r}")
    c = complex_attack(sc, gamma_d)
    s = simple_attack(sc)
    return sc.base.B * (c.P - s.P) - sc.base.c_a * (c.a - s.a)


@dataclass(frozen=True)
class DeterrenceThreshold:
    gamma_star: float
    delta_at_zero: float
    delta_at_gamma_a: float
    monotonicity_violated: bool = False


@dataclass(frozen=True)
class ConditionsFail:
    reason: str
    delta_at_zero: float
    delta_at_gamma_a: float


def find_threshold(f, gamma_a, lo_val=None, hi_val=None) -> DeterrenceThreshold | ConditionsFail:
    """Root of a decreasing net-benefit curve ``f`` on ``(0, gamma_a)``.

    Endpoint conditions that fail are reported, not raised.  If ``f`` is
    non-monotone on a 128-point scan, the smallest sign change is bracketed
    and ``monotonicity_violated`` is set.
    """
    lo_val = f(0.0) if lo_val is None else lo_val
    hi_val = f(gamma_a) if hi_val is None else hi_val
    if not lo_val > 0:
        return ConditionsFail("complex attack never profitable", lo_val, hi_val)
    if not hi_val < 0:
        return ConditionsFail("complex attack always profitable", lo_val, hi_val)

    grid = np.linspace(0.0, gamma_a, MONOTONICITY_SCAN)
    values = np.array([lo_val] + [f(float(g)) for g in grid[1:-1]] + [hi_val])
    violated = bool(np.any(np.diff(values) >= 0))
    i = int(np.argmax(values <= 0)) - 1
    lo, hi = float(grid[i]), float(grid[i + 1])
    mid = lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        f_mid = f(mid)
        if f_mid == 0:
            break
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
    return DeterrenceThreshold(mid, lo_val, hi_val, violated)


def deterrence_threshold(sc: DeterrenceScenario) -> DeterrenceThreshold | ConditionsFail:
    return find_threshold(lambda g: delta_pi(sc, g), sc.gamma_a)


class SensitivityParameter(str, Enum):
    S = "s"
    H_C_ALPHA = "h_c_alpha"
    B = "B"
    C_A = "c_a"
    D_FIXED = "d_fixed"


def _perturb(sc: DeterrenceScenario, parameter: SensitivityParameter, value) -> DeterrenceScenario:
    if parameter is SensitivityParameter.S:
        return sc.replace(base=sc.base.replace(s=value))
    if parameter is SensitivityParameter.H_C_ALPHA:
        return sc.replace(h_complex=dataclasses.replace(sc.h_complex, alpha=value))
    if parameter is SensitivityParameter.B:
        return sc.replace(base=sc.base.replace(B=value))
    if parameter is SensitivityParameter.C_A:
        return sc.replace(base=sc.base.replace(c_a=value))
    return sc.replace(d_fixed=value)


def _current(sc: DeterrenceScenario, parameter: SensitivityParameter) -> float:
    return {
        SensitivityParameter.S: sc.base.s,
        SensitivityParameter.H_C_ALPHA: sc.h_complex.alpha,
        SensitivityParameter.B: sc.base.B,
        SensitivityParameter.C_A: sc.base.c_a,
        SensitivityParameter.D_FIXED: sc.d_fixed,
    }[parameter]


@dataclass(frozen=True)
class ThresholdSensitivity:
    resolved: float
    implicit: float
    d_delta_dx: float
    d_delta_dgamma: float


def two_route_sensitivity(f, x, gamma_a, step=1e-4) -> ThresholdSensitivity:
    """Both routes to ``d gamma* / dx`` for a net-benefit function ``f(x, gamma)``.

    ``resolved`` re-solves the threshold at ``x +- h``; ``implicit`` is
    ``-(df/dx) / (df/dgamma)`` from central differences at the unperturbed
    root.
    """
    base = find_threshold(lambda g: f(x, g), gamma_a)
    if not isinstance(base, DeterrenceThreshold):
        raise DomainError(f"no deterrence threshold: {base.reason}")
    h = step * max(abs(x), 1e-3)
    up = find_threshold(lambda g: f(x + h, g), gamma_a)
    down = find_threshold(lambda g: f(x - h, g), gamma_a)
    if not (isinstance(up, DeterrenceThreshold) and isinstance(down, DeterrenceThreshold)):
        raise DomainError("threshold disappears under perturbation; reduce the step")
    resolved = (up.gamma_star - down.gamma_star) / (2 * h)

    g = base.gamma_star
    hg = min(step * max(g, 1e-3), g, gamma_a - g)
    d_gamma = (f(x, g + hg) - f(x, g - hg)) / (2 * hg)
    if abs(d_gamma) < DEGENERATE_SLOPE:
        raise DegenerateSensitivityError("d(dpi)/d(gamma_d) vanishes at the threshold")
    d_x = (f(x + h, g) - f(x - h, g)) / (2 * h)
    return ThresholdSensitivity(resolved, -d_x / d_gamma, d_x, d_gamma)


def threshold_sensitivity_detail(sc: DeterrenceScenario, parameter, step=1e-4) -> ThresholdSensitivity:
    parameter = SensitivityParameter(parameter)
    return two_route_sensitivity(
        lambda x, g: delta_pi(_perturb(sc, parameter, x), g),
        _current(sc, parameter), sc.gamma_a, step)


def threshold_sensitivity(sc: DeterrenceScenario, parameter, step=1e-4) -> float:
    detail = threshold_sensitivity_detail(sc, parameter, step)
    scale = max(abs(detail.resolved), abs(detail.implicit), 1e-9)
    if abs(detail.resolved - detail.implicit) >= SENSITIVITY_AGREEMENT * scale:
        raise ComputationError(
            f"threshold sensitivity routes disagree: {detail.resolved!r} vs {detail.implicit!r}")
    return detail.resolved


# -- targeting ----------------------------------------------------------------

@dataclass(frozen=True)
class DefenderProfile:
    d_k: float
    s_k: float
    gamma_k: float
    N_k: int
    B_k: float
    V_k: float = 1.0

    def __post_init__(self):
        if not (self.d_k >= 0 and self.s_k >= 0):
            raise DomainError("d_k and s_k must be >= 0")
        if not 0 <= self.gamma_k <= 1:
            raise DomainError(f"gamma_k must lie in [0, 1], got {self.gamma_k!r}")
        if int(self.N_k) != self.N_k or self.N_k < 1:
            raise DomainError(f"N_k must be a positive integer, got {self.N_k!r}")
        if not (self.B_k > 0 and self.V_k > 0):
            raise DomainError("B_k and V_k must be > 0")


@dataclass(frozen=True)
class FixedA:
    a: float


BEST_RESPONSE_PER_TARGET = "best_response"


@dataclass(frozen=True)
class TargetRow:
    a_k: float
    q_k: float
    expected_value: float
    net_payoff: float


def argmax_lowest(values) -> int:
    """Index of the maximum; ties resolve to the lowest index."""
    best = 0
    for i, v in enumerate(values):
        if v > values[best]:
            best = i
    return best


def _profile_config(profile: DefenderProfile, rho) -> SurfaceConfig:
    return SurfaceConfig(N=profile.N_k, rho=rho, gamma=profile.gamma_k, s=profile.s_k)


def select_target(p: ModelParams, profiles, mode=BEST_RESPONSE_PER_TARGET, rho=1.0):
    """Pick the defender the attacker goes after.

    ``p`` supplies the contest primitives and the attacker's costs; each
    profile supplies its own stakes and defense.  ``mode`` is ``FixedA(a)``
    (rank by ``B_k q_k``) or ``"best_response"`` (the attacker optimizes
    against each defender and ranks by net payoff).
    """
    profiles = list(profiles)
    if not profiles:
        raise DomainError("profile list must be nonempty")
    rows = []
    for prof in profiles:
        cfg = _profile_config(prof, rho)
        if isinstance(mode, FixedA):
            a = mode.a
        else:
            attack = _optimize_attack(p.replace(B=prof.B_k), prof.d_k, effective_signal(cfg), prof.N_k)
            adopt_gain = attack.payoff - p.F - prof.B_k * multi_surface_state(p, cfg, 0.0, prof.d_k).p_overall
            a = attack.a if attack.a > 0 and adopt_gain > 0 else 0.0
        q = multi_surface_state(p, cfg, a, prof.d_k).p_overall
        fixed = p.F if a > 0 else 0.0
        rows.append(TargetRow(a, q, prof.B_k * q, prof.B_k * q - p.c_a * a - fixed))
    key = [r.expected_value for r in rows] if isinstance(mode, FixedA) else [r.net_payoff for r in rows]
    return argmax_lowest(key), rows


@dataclass(frozen=True)
class RedirectionRow:
    defender: int
    was_target: bool
    is_target: bool
    value_change: float


def redirection_effect(p: ModelParams, profiles, k, d_step, mode=BEST_RESPONSE_PER_TARGET, rho=1.0):
    """Effect of raising defender ``k``'s investment by ``d_step`` on targeting."""
    profiles = list(profiles)
    if not 0 <= k < len(profiles):
        raise DomainError(f"defender index {k} out of range")
    if len(profiles) < 2:
        return []
    before, rows_before = select_target(p, profiles, mode, rho)
    bumped = list(profiles)
    bumped[k] = dataclasses.replace(profiles[k], d_k=profiles[k].d_k + d_step)
    after, rows_after = select_target(p, bumped, mode, rho)
    return [
        RedirectionRow(i, i == before, i == after, ra.expected_value - rb.expected_value)
        for i, (rb, ra) in enumerate(zip(rows_before, rows_after))
    ]
