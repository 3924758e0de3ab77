"""Arms-race ratio R and its comparative statics.

R is the attacker's marginal effect on breach probability over the
defender's.  The squared contest denominator cancels, leaving

    R = h'(1 + delta d s) / (h delta s)  +  |delta'| d / delta

where the second term is the erosion premium.  At the status quo with ``N``
diluted, cross-correlated surfaces this collapses to
``R0 = alpha N**rho / (delta0 s (1 + gamma (N - 1)))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .contest import ModelParams
from .errors import DomainError, SingularConfigurationError
from .multisurface import SurfaceConfig, correlation_gain

N_BRACKET = (1.0, 1e12)
BISECTION_ITERATIONS = 200
ROOT_SCAN_POINTS = 1024
DEGENERATE_EPS = 1e-12


@dataclass(frozen=True)
class RatioReport:
    r0: float
    r_general: float
    amplification_component: float
    erosion_premium: float


def r0_single(p: ModelParams) -> float:
    if p.s == 0:
        raise SingularConfigurationError("R0 is undefined at s = 0")
    return p.alpha / (p.delta0 * p.s)


def r_general(p: ModelParams, a, d, s_eff) -> RatioReport:
    if a < 0 or d < 0:
        raise DomainError("a and d must be >= 0")
    if s_eff <= 0:
        raise SingularConfigurationError("R is undefined at s_eff = 0")
    h = p.h.value(a)
    dl = p.delta.value(a)
    amplification = p.h.slope(a) * (1.0 + dl * d * s_eff) / (h * dl * s_eff)
    erosion = abs(p.delta.slope(a)) * d / dl
    return RatioReport(
        r0=p.alpha / (p.delta0 * s_eff),
        r_general=amplification + erosion,
        amplification_component=amplification,
        erosion_premium=erosion,
    )


def _surface_factor(N, rho, gamma):
    """N**rho / (1 + gamma (N - 1)); exactly 1 at gamma = rho = 1."""
    gain = correlation_gain(N, gamma)
    if rho == 1:
        return N / gain
    return N**rho / gain


def r0_multi(p: ModelParams, cfg: SurfaceConfig) -> float:
    if cfg.s == 0:
        raise SingularConfigurationError("R0 is undefined at s = 0")
    return p.alpha / (p.delta0 * cfg.s) * _surface_factor(cfg.N, cfg.rho, cfg.gamma)


def dgamma_sensitivity_at_zero(p: ModelParams, cfg: SurfaceConfig) -> float:
    """dR0/dgamma at gamma = 0; zero for a single surface."""
    if cfg.s == 0:
        raise SingularConfigurationError("R0 is undefined at s = 0")
    return -p.alpha * cfg.N**cfg.rho * (cfg.N - 1) / (p.delta0 * cfg.s)


@dataclass(frozen=True)
class SurfaceThreshold:
    """Smallest surface count at which R0 reaches 1.

    ``n_integer`` is the first whole surface count with R0 > 1.
    ``dn_dgamma`` is None when its denominator is degenerate.
    """

    n_star: float
    n_integer: int
    dn_dgamma: float | None
    degenerate: bool
    multiple_roots_possible: bool


def _threshold_gap(p, N, rho, gamma, s):
    return p.alpha * N**rho - p.delta0 * s * correlation_gain(N, gamma)


def critical_surface_count(p: ModelParams, cfg: SurfaceConfig) -> SurfaceThreshold | None:
    """Solve ``alpha N**rho = delta0 s (1 + gamma (N - 1))`` for the smallest N.

    ``cfg.N`` is ignored.  Returns None when R0 - 1 keeps one sign over
    N in [1, 1e12].
    """
    if cfg.rho <= 0:
        raise DomainError("critical_surface_count requires rho > 0")
    if cfg.s == 0:
        raise SingularConfigurationError("R0 is undefined at s = 0")
    rho, gamma, s = cfg.rho, cfg.gamma, cfg.s

    def gap(N):
        return _threshold_gap(p, N, rho, gamma, s)

    grid = np.geomspace(*N_BRACKET, ROOT_SCAN_POINTS)
    values = np.array([gap(N) for N in grid])
    signs = np.sign(values)
    changes = np.flatnonzero(signs[:-1] * signs[1:] < 0)
    zeros = np.flatnonzero(values == 0)
    crossings = sorted(set(changes.tolist()) | set(zeros.tolist()))
    if not crossings:
        return None
    i = crossings[0]
    if values[i] == 0:
        n_star = float(grid[i])
    else:
        lo, hi = float(grid[i]), float(grid[i + 1])
        g_lo = values[i]
        for _ in range(BISECTION_ITERATIONS):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            g_mid = gap(mid)
            if g_mid == 0:
                lo = hi = mid
                break
            if (g_mid > 0) == (g_lo > 0):
                lo, g_lo = mid, g_mid
            else:
                hi = mid
        n_star = 0.5 * (lo + hi)

    n_integer = math.ceil(n_star)
    if gap(n_integer) <= 0:
        n_integer += 1

    denom = p.alpha * rho * n_star ** (rho - 1.0) - p.delta0 * s * gamma
    degenerate = abs(denom) < DEGENERATE_EPS
    dn_dgamma = None if degenerate else p.delta0 * s * (n_star - 1.0) / denom
    sign_changes = len(changes) + len(zeros)
    return SurfaceThreshold(n_star, n_integer, dn_dgamma, degenerate, sign_changes > 1)


class SweepAxis(str, Enum):
    N = "N"
    GAMMA = "gamma"
    RHO = "rho"


@dataclass(frozen=True)
class SweepRow:
    value: float
    r0: float
    ok: bool


def sweep_r0(p: ModelParams, cfg: SurfaceConfig, axis, grid) -> list[SweepRow]:
    """R0 along one axis; out-of-domain points give ``ok=False`` and NaN."""
    axis = SweepAxis(axis)
    rows = []
    for value in grid:
        try:
            if axis is SweepAxis.N:
                point = SurfaceConfig(N=value, rho=cfg.rho, gamma=cfg.gamma, s=cfg.s)
            elif axis is SweepAxis.GAMMA:
                point = SurfaceConfig(N=cfg.N, rho=cfg.rho, gamma=value, s=cfg.s)
            else:
                point = SurfaceConfig(N=cfg.N, rho=value, gamma=cfg.gamma, s=cfg.s)
            rows.append(SweepRow(float(value), r0_multi(p, point), True))
        except (DomainError, SingularConfigurationError):
            rows.append(SweepRow(float(value), math.nan, False))
    return rows
