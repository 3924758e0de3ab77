"""Bounded scalar maximization for possibly non-concave payoffs.

A coarse grid scan (linear plus geometric near the lower bound) picks the
basin of the global maximum.  Bounded Brent refines it, combining golden
section with parabolic steps.  When an analytic derivative is supplied and
changes sign across the basin, the maximizer is polished to machine
precision by root-finding on the first-order condition.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

XATOL = 1e-10
MAX_ITER = 400
LINEAR_POINTS = 129
GEOMETRIC_POINTS = 64


@dataclass(frozen=True)
class Maximum:
    x: float
    value: float


def scan_grid(lo: float, hi: float) -> np.ndarray:
    width = hi - lo
    linear = np.linspace(lo, hi, LINEAR_POINTS)
    geometric = lo + np.geomspace(width * 1e-7, width, GEOMETRIC_POINTS)
    grid = np.unique(np.concatenate([linear, geometric]))
    return grid[(grid >= lo) & (grid <= hi)]


def maximize(f, lo: float, hi: float, grad=None) -> Maximum:
    """Global-ish maximum of ``f`` on ``[lo, hi]``.

    ``f`` must accept numpy arrays.  ``grad`` is optional and scalar.
    """
    if not hi > lo:
        return Maximum(float(lo), float(f(lo)))
    grid = scan_grid(lo, hi)
    values = np.asarray(f(grid), dtype=float)
    i = int(np.argmax(values))
    candidates = [(float(grid[i]), float(values[i]))]
    b_lo = float(grid[max(i - 1, 0)])
    b_hi = float(grid[min(i + 1, len(grid) - 1)])

    res = minimize_scalar(lambda x: -float(f(x)), bounds=(b_lo, b_hi), method="bounded",
                          options={"xatol": XATOL, "maxiter": MAX_ITER})
    candidates.append((float(res.x), float(f(float(res.x)))))

    if grad is not None:
        g_lo, g_hi = grad(b_lo), grad(b_hi)
        if g_lo > 0 > g_hi:
            root = brentq(grad, b_lo, b_hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITER)
            candidates.append((float(root), float(f(root))))

    # Later candidates are more precise; prefer them on ties within roundoff.
    best = candidates[0]
    for x, v in candidates[1:]:
        if v >= best[1] - 4 * np.finfo(float).eps * (1.0 + abs(best[1])):
            best = (x, v)
    return Maximum(*best)
