"""Data series for the three figures, plus the post-emit caption validator.

Figure parameters are implementation defaults; every choice is written to
the table metadata so nothing is silent.
"""
from __future__ import annotations

import dataclasses

import numpy as np

from .contest import ModelParams
from .dynamics import best_response_curves, simulate_discrete
from .multisurface import SurfaceConfig, multi_surface_state
from .output import PlotSpec, ResultTable, parse_csv, render_csv
from .ratio import r0_multi
from .scenario import FigureConfig

FIG2A_GAMMAS = (0.0, 0.2, 0.5, 1.0)
FIG2B_GAMMAS = (0.0, 1.0)
FIG3_NS = (1, 3, 10, 30)
N_GRID = tuple(float(n) for n in np.unique(np.round(np.geomspace(1.0, 1000.0, 31))))
GAMMA_GRID = tuple(float(g) for g in np.linspace(0.0, 1.0, 101))
LINEAR_R2_FLOOR = 1.0 - 1e-12


def _fmt(values) -> str:
    return " ".join(format(float(v), "g") for v in values)


def _fig1_starts(p: ModelParams):
    d_hi, a_hi = p.d_max, p.a_max
    return ((0.0, 0.0), (d_hi, 0.0), (0.0, a_hi), (d_hi, a_hi))


def fig1_tables(p: ModelParams, cfg: FigureConfig):
    """Best-response curves and adjustment paths at each beta."""
    curves, paths = [], []
    for beta in cfg.betas:
        pb = p.replace(delta=dataclasses.replace(p.delta, beta=beta))
        a_grid = np.linspace(0.0, pb.a_max, cfg.points)
        d_grid = np.linspace(0.0, pb.d_max, cfg.points)
        defender, attacker = best_response_curves(pb, pb.s, d_grid, a_grid)
        for x, y, corner in zip(defender.grid, defender.responses, defender.clamped):
            curves.append((beta, "defender", x, y, not corner))
        for x, y, corner in zip(attacker.grid, attacker.responses, attacker.clamped):
            curves.append((beta, "attacker", x, y, not corner))
        for i, start in enumerate(_fig1_starts(pb)):
            traj = simulate_discrete(pb, pb.s, start)
            for step, (d, a) in enumerate(zip(traj.d_path, traj.a_path)):
                paths.append((beta, i, step, d, a))
    meta = {
        "betas": _fmt(cfg.betas),
        "grid": f"a in [0, B/c_a], d in [0, V/c_d], {cfg.points} points",
        "path_starts": "corners of [0, V/c_d] x [0, B/c_a]",
    }
    return (
        ResultTable("fig1_curves", ["beta", "curve", "x", "response", "interior"], curves, dict(meta),
                    PlotSpec("fig1", "x", "response", "curve")),
        ResultTable("fig1_paths", ["beta", "start", "step", "d", "a"], paths, dict(meta),
                    PlotSpec("fig1", "d", "a", "beta")),
    )


def fig2a_table(p: ModelParams, s: float):
    rows = [(g, N, r0_multi(p, SurfaceConfig(N=N, rho=1.0, gamma=g, s=s)))
            for g in FIG2A_GAMMAS for N in N_GRID]
    return ResultTable("fig2a", ["gamma", "N", "r0"], rows,
                       {"rho": "1", "gammas": _fmt(FIG2A_GAMMAS), "N_grid": _fmt(N_GRID)},
                       PlotSpec("fig2a", "N", "r0", "gamma"))


def fig2b_table(p: ModelParams, s: float, a: float, d: float):
    rows = [(g, N, multi_surface_state(p, SurfaceConfig(N=N, rho=1.0, gamma=g, s=s), a, d).lam)
            for g in FIG2B_GAMMAS for N in N_GRID]
    return ResultTable("fig2b", ["gamma", "N", "lambda"], rows,
                       {"rho": "1", "a": format(a, "g"), "d": format(d, "g"), "N_grid": _fmt(N_GRID)},
                       PlotSpec("fig2b", "N", "lambda", "gamma"))


def fig3_table(p: ModelParams, s: float):
    rows = [(N, g, r0_multi(p, SurfaceConfig(N=N, rho=1.0, gamma=g, s=s)))
            for N in FIG3_NS for g in GAMMA_GRID]
    return ResultTable("fig3", ["N", "gamma", "r0"], rows,
                       {"rho": "1", "Ns": _fmt(FIG3_NS), "gamma_points": str(len(GAMMA_GRID))},
                       PlotSpec("fig3", "gamma", "r0", "N"))


def figure_tables(p: ModelParams, cfg: FigureConfig) -> list[ResultTable]:
    return [
        *fig1_tables(p, cfg),
        fig2a_table(p, p.s),
        fig2b_table(p, p.s, cfg.a, cfg.d),
        fig3_table(p, p.s),
    ]


# -- validator ----------------------------------------------------------------

def _series(t: ResultTable, key_col, key, x_col, y_col):
    k, x, y = (t.columns.index(c) for c in (key_col, x_col, y_col))
    pts = [(row[x], row[y]) for row in t.rows if row[k] == key]
    return np.array([p[0] for p in pts], dtype=float), np.array([p[1] for p in pts], dtype=float)


def _flat(y) -> tuple[bool, float]:
    spread = float(y.max() - y.min())
    return bool(spread <= 2 * np.finfo(float).eps * float(np.abs(y).max())), spread


def _r_squared(x, y) -> float:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = float(np.sum((y - y.mean()) ** 2))
    return 1.0 - float(np.sum(resid**2)) / total if total > 0 else 1.0


def _nondecreasing_interior(t: ResultTable, beta) -> tuple[bool, float]:
    rows = [r for r in t.rows if r[0] == beta and r[1] == "defender"]
    worst = 0.0
    for r0, r1 in zip(rows, rows[1:]):
        if r0[4] and r1[4]:
            worst = min(worst, r1[3] - r0[3])
    return bool(worst >= 0.0), worst


def _non_monotone(y) -> tuple[bool, float]:
    k = int(np.argmax(y))
    dip = float(min(y[k] - y[0], y[k] - y[-1]))
    return bool(0 < k < len(y) - 1 and dip > 0), dip


def validate_figures(tables: dict[str, ResultTable]) -> ResultTable:
    """Caption shape checks on re-parsed figure tables.

    Returns a table of ``(check, passed, value)`` where ``value`` is the
    statistic the check thresholds (spread, R^2, worst step, or dip).
    """
    checks = []
    fig2a, fig2b, fig3 = tables["fig2a"], tables["fig2b"], tables["fig3"]
    curves = tables["fig1_curves"]

    ok, spread = _flat(_series(fig2a, "gamma", 1.0, "N", "r0")[1])
    checks.append(("fig2a_gamma1_flat", ok, spread))
    x, y = _series(fig2a, "gamma", 0.0, "N", "r0")
    r2 = _r_squared(x, y)
    checks.append(("fig2a_gamma0_linear", bool(r2 > LINEAR_R2_FLOOR), r2))
    for g in FIG2B_GAMMAS:
        _, lam = _series(fig2b, "gamma", g, "N", "lambda")
        steps = np.diff(lam)
        checks.append((f"fig2b_gamma{g:g}_increasing", bool(np.all(steps > 0)), float(steps.min())))
    ok, spread = _flat(_series(fig3, "N", 1, "gamma", "r0")[1])
    checks.append(("fig3_N1_flat", ok, spread))
    for N in FIG3_NS[1:]:
        steps = np.diff(_series(fig3, "N", N, "gamma", "r0")[1])
        checks.append((f"fig3_N{N}_decreasing", bool(np.all(steps < 0)), float(steps.max())))

    betas = sorted({r[0] for r in curves.rows})
    for beta in betas:
        ok, worst = _nondecreasing_interior(curves, beta)
        checks.append((f"fig1_defender_nondecreasing_beta{beta:g}", ok, worst))
    mid = betas[len(betas) // 2]
    rows = [r for r in curves.rows if r[0] == mid and r[1] == "attacker"]
    ok, dip = _non_monotone(np.array([r[3] for r in rows], dtype=float))
    checks.append((f"fig1_attacker_nonmonotone_beta{mid:g}", ok, dip))
    return ResultTable("figure_checks", ["check", "passed", "value"], checks)


def reparse(tables) -> dict[str, ResultTable]:
    """Round-trip tables through their CSV text, as the validator sees them."""
    return {t.name: parse_csv(render_csv(t), t.name) for t in tables}
