"""Best-response dynamics and local stability.

Discrete:   x+ = x + eta (BR(x) - x)
Continuous: x' = BR(x) - x, integrated with classic RK4.

With ``F > 0`` the attacker's best response is discontinuous where adoption
flips; such steps are recorded in ``Trajectory.br_discontinuities`` and no
convergence theorem is claimed across them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .contest import ModelParams
from .equilibrium import (
    EquilibriumResult,
    attacker_response,
    defender_best_response,
    defender_interior_response,
)
from .errors import CornerEquilibriumError, DomainError, IntegrationFailure

DEFAULT_ETA = 0.15
DEFAULT_TOL = 1e-8
DEFAULT_MAX_STEPS = 50_000
BR_RESIDUAL_TOL = 1e-6
DIVERGENCE_WINDOW = 50
DIVERGENCE_FACTOR = 1e3
DIVERGENCE_SLACK = 1e-3  # an attracting cycle reached from outside shrinks only slowly
SLOPE_STEP = 1e-5


@dataclass(frozen=True)
class Trajectory:
    times: tuple[float, ...]
    d_path: tuple[float, ...]
    a_path: tuple[float, ...]
    converged: bool
    fixed_point: tuple[float, float] | None
    sup_norm_residual: float
    diverged: bool = False
    br_discontinuities: tuple[int, ...] = ()

    @property
    def steps(self) -> int:
        return len(self.d_path) - 1

    @property
    def final(self) -> tuple[float, float]:
        return self.d_path[-1], self.a_path[-1]


def best_responses(p: ModelParams, s_eff, state):
    """(d_BR(a), a_BR(d), attacker adopts) at ``state = (d, a)``."""
    d, a = state
    response = attacker_response(p, d, s_eff)
    return defender_best_response(p, a, s_eff), response.a, response.adopts


def step_discrete(p: ModelParams, s_eff, state, eta):
    d, a = state
    if d < 0 or a < 0:
        raise DomainError("state must be componentwise >= 0")
    d_br, a_br, _ = best_responses(p, s_eff, state)
    # eta > 1 is allowed for stability probes; the clamp keeps the orthant.
    return max(0.0, d + eta * (d_br - d)), max(0.0, a + eta * (a_br - a))


def _divergent(residuals, tol):
    # A rotating spiral never grows monotonically step by step, so compare
    # the residual envelope (window maxima) at both ends of the trailing span.
    w = DIVERGENCE_WINDOW
    if len(residuals) < 3 * w:
        return False
    tail = residuals[-3 * w:]
    if min(tail) <= DIVERGENCE_FACTOR * tol:
        return False
    return max(tail[-w:]) >= (1.0 - DIVERGENCE_SLACK) * max(tail[:w])


def simulate_discrete(p: ModelParams, s_eff, start, eta=DEFAULT_ETA,
                      max_steps=DEFAULT_MAX_STEPS, tol=DEFAULT_TOL) -> Trajectory:
    """Damped best-response iteration.

    Stops when the step ``eta * |BR(x) - x|`` falls below ``tol * eta``
    (convergence), when the residual envelope has not shrunk over the last
    150 steps (max of the final 50 within 0.1% of the first 50) while every
    residual stays above ``1e3 * tol`` (local divergence), or after
    ``max_steps``.
    """
    if not tol > 0:
        raise DomainError("tol must be > 0")
    if not eta > 0:
        raise DomainError("eta must be > 0")
    d, a = float(start[0]), float(start[1])
    if d < 0 or a < 0:
        raise DomainError("start must be componentwise >= 0")
    d_path, a_path, residuals, jumps = [d], [a], [], []
    previous_adopts = None
    converged = diverged = False
    residual = math.inf
    for step in range(max_steps + 1):
        d_br, a_br, adopts = best_responses(p, s_eff, (d, a))
        if previous_adopts is not None and adopts != previous_adopts:
            jumps.append(step)
        previous_adopts = adopts
        residual = max(abs(d_br - d), abs(a_br - a))
        residuals.append(residual)
        if eta * residual < tol * eta and residual < BR_RESIDUAL_TOL:
            converged = True
            break
        if _divergent(residuals, tol):
            diverged = True
            break
        if step == max_steps:
            break
        d = max(0.0, d + eta * (d_br - d))
        a = max(0.0, a + eta * (a_br - a))
        d_path.append(d)
        a_path.append(a)
    return Trajectory(
        times=tuple(float(i) for i in range(len(d_path))),
        d_path=tuple(d_path), a_path=tuple(a_path),
        converged=converged, fixed_point=(d, a) if converged else None,
        sup_norm_residual=residual, diverged=diverged, br_discontinuities=tuple(jumps),
    )


def simulate_continuous(p: ModelParams, s_eff, start, t_end, dt, tol=DEFAULT_TOL) -> Trajectory:
    """RK4 on ``F(d, a) = (d_BR(a) - d, a_BR(d) - a)``, clamped to the orthant."""
    if not (dt > 0 and t_end > 0):
        raise DomainError("dt and t_end must be > 0")

    def field_at(x):
        d_br, a_br, adopts = best_responses(p, s_eff, (max(0.0, x[0]), max(0.0, x[1])))
        return (d_br - x[0], a_br - x[1]), adopts

    x = (float(start[0]), float(start[1]))
    times, d_path, a_path, jumps = [0.0], [x[0]], [x[1]], []
    n_steps = int(math.ceil(t_end / dt - 1e-12))
    converged = False
    previous_adopts = None
    residual = math.inf
    for i in range(n_steps + 1):
        k1, adopts = field_at(x)
        if previous_adopts is not None and adopts != previous_adopts:
            jumps.append(i)
        previous_adopts = adopts
        residual = max(abs(k1[0]), abs(k1[1]))
        if residual < min(tol, BR_RESIDUAL_TOL):
            converged = True
            break
        if i == n_steps:
            break
        k2, _ = field_at((x[0] + 0.5 * dt * k1[0], x[1] + 0.5 * dt * k1[1]))
        k3, _ = field_at((x[0] + 0.5 * dt * k2[0], x[1] + 0.5 * dt * k2[1]))
        k4, _ = field_at((x[0] + dt * k3[0], x[1] + dt * k3[1]))
        nxt = tuple(
            max(0.0, x[j] + dt * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) / 6.0)
            for j in range(2)
        )
        if not all(math.isfinite(v) for v in nxt):
            raise IntegrationFailure("RK4 step produced a non-finite state", x)
        x = nxt
        times.append(times[-1] + dt)
        d_path.append(x[0])
        a_path.append(x[1])
    return Trajectory(
        times=tuple(times), d_path=tuple(d_path), a_path=tuple(a_path),
        converged=converged, fixed_point=x if converged else None,
        sup_norm_residual=residual, br_discontinuities=tuple(jumps),
    )


class StabilityClass(str, Enum):
    STABLE_NODE = "stable_node"
    STABLE_SPIRAL = "stable_spiral"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class StabilityReport:
    br_slope_d: float
    br_slope_a: float
    rho0: float
    eta_bound: float
    det_j: float
    classification: StabilityClass

    @property
    def discrete_spectral_radius(self):
        """Spectral radius of the damped map's Jacobian, as a function of eta."""
        product = self.br_slope_d * self.br_slope_a

        def radius(eta):
            if product >= 0:
                root = math.sqrt(product)
                return max(abs(1 - eta + eta * root), abs(1 - eta - eta * root))
            return math.hypot(1 - eta, eta * math.sqrt(-product))
        return radius


def stability_report(p: ModelParams, s_eff, eq: EquilibriumResult) -> StabilityReport:
    """Local stability from finite-difference best-response slopes."""
    if not eq.interior:
        raise CornerEquilibriumError("best-response slopes are undefined at a corner equilibrium")
    a, d = eq.a_star, eq.d_star
    ha = SLOPE_STEP * max(abs(a), 1e-3)
    hd = SLOPE_STEP * max(abs(d), 1e-3)
    slope_d = (defender_interior_response(p, a + ha, s_eff)
               - defender_interior_response(p, a - ha, s_eff)) / (2 * ha)
    slope_a = (attacker_response(p, d + hd, s_eff).a - attacker_response(p, d - hd, s_eff).a) / (2 * hd)
    product = float(slope_d * slope_a)
    rho0 = math.sqrt(abs(product))
    det_j = 1.0 - product
    if det_j <= 0:
        cls = StabilityClass.DEGENERATE
    elif product >= 0:
        cls = StabilityClass.STABLE_NODE
    else:
        cls = StabilityClass.STABLE_SPIRAL
    return StabilityReport(float(slope_d), float(slope_a), rho0, 2.0 / (rho0 + 1.0), det_j, cls)


@dataclass(frozen=True)
class BestResponseCurve:
    grid: tuple[float, ...]
    responses: tuple[float, ...]
    clamped: tuple[bool, ...]


def best_response_curves(p: ModelParams, s_eff, d_grid, a_grid):
    """(defender curve over ``a_grid``, attacker curve over ``d_grid``)."""
    d_resp, d_clamp = [], []
    for a in a_grid:
        raw = float(defender_interior_response(p, a, s_eff))
        d_resp.append(max(0.0, raw))
        d_clamp.append(not raw > 0)
    a_resp, a_clamp = [], []
    for d in d_grid:
        r = attacker_response(p, d, s_eff)
        a_resp.append(r.a)
        a_clamp.append(not r.adopts)
    defender = BestResponseCurve(tuple(float(x) for x in a_grid), tuple(d_resp), tuple(d_clamp))
    attacker = BestResponseCurve(tuple(float(x) for x in d_grid), tuple(a_resp), tuple(a_clamp))
    return defender, attacker
