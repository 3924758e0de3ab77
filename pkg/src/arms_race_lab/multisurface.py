"""Symmetric multi-surface aggregation.

Each of ``N`` surfaces receives a diluted share ``s / N**rho`` of the signal
budget, topped up by a fraction ``gamma`` of every other surface's share.
Per-surface breach probabilities combine through the log-breach rate
``lam = -N log(1 - q)`` and ``P = 1 - exp(-lam)``.  Both use log1p/expm1 so
that ``N`` up to 1e9 and ``q`` near 0 or 1 keep full precision.

``N`` may be a non-integer real (log-spaced sweeps); every formula extends
continuously.  The attacker's investment ``a`` is one scalar applied to all
surfaces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .contest import ModelParams, breach_probability
from .errors import DomainError


@dataclass(frozen=True)
class SurfaceConfig:
    N: float = 1
    rho: float = 1.0
    gamma: float = 0.0
    s: float = 1.0

    def __post_init__(self):
        if not (self.N >= 1 and math.isfinite(self.N)):
            raise DomainError(f"N must be >= 1, got {self.N!r}")
        if not 0 <= self.rho <= 1:
            raise DomainError(f"rho must lie in [0, 1], got {self.rho!r}")
        if not 0 <= self.gamma <= 1:
            raise DomainError(f"gamma must lie in [0, 1], got {self.gamma!r}")
        if not (self.s >= 0 and math.isfinite(self.s)):
            raise DomainError(f"s must be a nonnegative finite real, got {self.s!r}")

    def with_N(self, N) -> "SurfaceConfig":
        return SurfaceConfig(N=N, rho=self.rho, gamma=self.gamma, s=self.s)


def correlation_gain(N, gamma):
    """``1 + gamma (N - 1)``, exact at ``gamma = 1`` and at ``N = 1``."""
    if gamma == 1:
        return float(N)
    return 1.0 + gamma * (N - 1)


def effective_signal(cfg: SurfaceConfig) -> float:
    if cfg.gamma == 1:
        return cfg.s * cfg.N ** (1.0 - cfg.rho)
    return cfg.s / cfg.N**cfg.rho * correlation_gain(cfg.N, cfg.gamma)


def log_breach_rate(q, N) -> float:
    return -N * math.log1p(-q)


def overall_breach(lam) -> float:
    return -math.expm1(-lam)


@dataclass(frozen=True)
class MultiSurfaceState:
    cfg: SurfaceConfig
    q_per_surface: float
    lam: float
    p_overall: float


def multi_surface_state(p: ModelParams, cfg: SurfaceConfig, a, d) -> MultiSurfaceState:
    q = breach_probability(p, a, d, effective_signal(cfg))
    lam = log_breach_rate(q, cfg.N)
    return MultiSurfaceState(cfg, q, lam, overall_breach(lam))


def aggregate_breach(p: ModelParams, a, d, s_eff, N) -> float:
    """Overall breach probability over ``N`` identical surfaces."""
    return overall_breach(log_breach_rate(breach_probability(p, a, d, s_eff), N))


def asymptotic_breach(p: ModelParams, a) -> float:
    """Per-surface breach once the defense term has been diluted away."""
    if a < 0:
        raise DomainError(f"a must be >= 0, got {a!r}")
    attack = p.q0 * p.h.value(a)
    return attack / (attack + (1.0 - p.q0))


@dataclass(frozen=True)
class ScalingRow:
    N: float
    s_eff: float
    q: float
    lam: float
    P: float
    r0: float


def scaling_experiment(p: ModelParams, cfg_template: SurfaceConfig, N_grid, a, d) -> list[ScalingRow]:
    from .ratio import r0_multi

    grid = list(N_grid)
    if any(b < a_ for a_, b in zip(grid, grid[1:])):
        raise DomainError("N_grid must be ascending")
    rows = []
    for N in grid:
        cfg = cfg_template.with_N(N)
        state = multi_surface_state(p, cfg, a, d)
        rows.append(ScalingRow(float(N), effective_signal(cfg), state.q_per_surface,
                               state.lam, state.p_overall, r0_multi(p, cfg)))
    return rows
