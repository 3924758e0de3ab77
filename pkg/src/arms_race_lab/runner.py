"""Subcommand orchestration: scenario in, result tables out."""
from __future__ import annotations

import numpy as np

from . import __version__
from .dynamics import simulate_continuous, simulate_discrete, stability_report
from .equilibrium import provocation_threshold, solve_equilibrium
from .errors import ComputationError, ValidationError
from .figures import figure_tables
from .multisurface import effective_signal, scaling_experiment
from .output import PlotSpec, ResultTable
from .ratio import critical_surface_count, dgamma_sensitivity_at_zero, r0_multi, r_general
from .rng import random_starts
from .scenario import REQUIRED_SECTIONS, SUBCOMMANDS, Scenario
from .strategic import ConditionsFail, delta_pi, deterrence_threshold, select_target

DEFAULT_SCALING_GRID = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0)
NAN = float("nan")


def _ratio(sc: Scenario):
    p = sc.model
    a, d = sc.point
    rep = r_general(p, a, d, p.s)
    tables = [ResultTable(
        "ratio", ["a", "d", "s_eff", "r0", "r_general", "amplification_component", "erosion_premium"],
        [(a, d, p.s, rep.r0, rep.r_general, rep.amplification_component, rep.erosion_premium)],
    )]
    if sc.surfaces is not None:
        cfg = sc.surfaces
        th = critical_surface_count(p, cfg) if cfg.rho > 0 else None
        tables.append(ResultTable(
            "ratio_surfaces",
            ["N", "rho", "gamma", "s", "r0_multi", "dr0_dgamma_at_zero", "n_star", "n_integer", "dn_dgamma"],
            [(cfg.N, cfg.rho, cfg.gamma, cfg.s, r0_multi(p, cfg), dgamma_sensitivity_at_zero(p, cfg),
              th.n_star if th else NAN, th.n_integer if th else -1,
              th.dn_dgamma if th and th.dn_dgamma is not None else NAN)],
        ))
    return tables


def _equilibrium(sc: Scenario):
    p = sc.model
    eq = solve_equilibrium(p)
    row = [eq.d_star, eq.a_star, eq.q_star, eq.r_at_eq, eq.interior_defender, eq.interior_attacker,
           eq.uniqueness_certified, len(eq.fixed_points), eq.method]
    if eq.interior:
        st = stability_report(p, p.s, eq)
        row += [st.br_slope_d, st.br_slope_a, st.rho0, st.eta_bound, st.det_j, st.classification.value]
    else:
        row += [NAN, NAN, NAN, NAN, NAN, "corner"]
    prov = provocation_threshold(p)
    row += [prov.status.value, NAN if prov.d_hat is None else prov.d_hat]
    columns = ["d_star", "a_star", "q_star", "r_at_eq", "interior_defender", "interior_attacker",
               "uniqueness_certified", "fixed_points", "method", "br_slope_d", "br_slope_a", "rho0",
               "eta_bound", "det_j", "stability", "provocation", "d_hat"]
    return [ResultTable("equilibrium", columns, [tuple(row)])]


def _dynamics(sc: Scenario):
    p, dyn = sc.model, sc.dynamics
    starts = list(dyn.starts) + random_starts(sc.seed, dyn.random_starts, p.d_max, p.a_max)
    summary, paths = [], []
    for i, start in enumerate(starts):
        traj = simulate_discrete(p, p.s, start, dyn.eta, dyn.max_steps, dyn.tol)
        for step, (d, a) in enumerate(zip(traj.d_path, traj.a_path)):
            paths.append((i, "discrete", float(step), d, a))
        row = [i, start[0], start[1], traj.converged, traj.diverged, traj.steps, *traj.final,
               traj.sup_norm_residual, len(traj.br_discontinuities)]
        if dyn.t_end is not None:
            ct = simulate_continuous(p, p.s, start, dyn.t_end, dyn.dt, dyn.tol)
            for t, d, a in zip(ct.times, ct.d_path, ct.a_path):
                paths.append((i, "continuous", t, d, a))
            row += [ct.converged, *ct.final]
        else:
            row += [False, NAN, NAN]
        summary.append(tuple(row))
    meta = {"eta": format(dyn.eta, "g"), "tol": format(dyn.tol, "g"), "max_steps": str(dyn.max_steps),
            "seed": str(sc.seed), "random_starts": str(dyn.random_starts)}
    return [
        ResultTable("dynamics_summary",
                    ["start", "d0", "a0", "converged", "diverged", "steps", "d_final", "a_final",
                     "residual", "br_discontinuities", "rk4_converged", "rk4_d_final", "rk4_a_final"],
                    summary, dict(meta)),
        ResultTable("dynamics_paths", ["start", "method", "t", "d", "a"], paths, dict(meta),
                    PlotSpec("dynamics", "d", "a", "start")),
    ]


def _scaling(sc: Scenario):
    grid = sc.surfaces_grid or DEFAULT_SCALING_GRID
    a, d = sc.surfaces_point
    rows = [(r.N, r.s_eff, r.q, r.lam, r.P, r.r0)
            for r in scaling_experiment(sc.model, sc.surfaces, grid, a, d)]
    cfg = sc.surfaces
    meta = {"rho": format(cfg.rho, "g"), "gamma": format(cfg.gamma, "g"), "a": format(a, "g"), "d": format(d, "g")}
    return [ResultTable("scaling", ["N", "s_eff", "q", "lambda", "P", "r0"], rows, meta,
                        PlotSpec("fig2b", "N", "lambda"))]


def _deterrence(sc: Scenario):
    det = sc.deterrence
    det.validate_potency()
    grid = np.linspace(0.0, 1.0, sc.deterrence_grid_points)
    curve = [(float(g), delta_pi(det, float(g))) for g in grid]
    th = deterrence_threshold(det)
    if isinstance(th, ConditionsFail):
        row = ("conditions_fail", NAN, th.delta_at_zero, th.delta_at_gamma_a, False, th.reason)
    else:
        row = ("threshold", th.gamma_star, th.delta_at_zero, th.delta_at_gamma_a,
               th.monotonicity_violated, "ok")
    return [
        ResultTable("deterrence_threshold",
                    ["status", "gamma_star", "delta_at_zero", "delta_at_gamma_a", "monotonicity_violated", "reason"],
                    [row]),
        ResultTable("deterrence_curve", ["gamma_d", "delta_pi"], curve, {},
                    PlotSpec("deterrence", "gamma_d", "delta_pi")),
    ]


def _targeting(sc: Scenario):
    tg = sc.targeting
    index, rows = select_target(sc.model, tg.profiles, tg.mode, tg.rho)
    out = [(i, r.a_k, r.q_k, r.expected_value, r.net_payoff, i == index) for i, r in enumerate(rows)]
    return [ResultTable("targeting", ["defender", "a_k", "q_k", "expected_value", "net_payoff", "selected"], out)]


def _figures(sc: Scenario):
    return figure_tables(sc.model, sc.figures)


_HANDLERS = {
    "ratio": _ratio,
    "equilibrium": _equilibrium,
    "dynamics": _dynamics,
    "scaling": _scaling,
    "deterrence": _deterrence,
    "targeting": _targeting,
    "figures": _figures,
}


def run_subcommand(name: str, sc: Scenario) -> list[ResultTable]:
    """Run ``name`` on ``sc``; every table carries the provenance metadata."""
    if name not in SUBCOMMANDS:
        raise ValidationError(f"unknown subcommand {name!r}; expected one of {', '.join(SUBCOMMANDS)}")
    for section in REQUIRED_SECTIONS[name]:
        if section not in sc.sections:
            raise ValidationError(f"subcommand {name!r} requires section {section!r}")
    try:
        tables = _HANDLERS[name](sc)
    except (ZeroDivisionError, OverflowError, FloatingPointError) as exc:
        raise ComputationError(f"{name}: {exc}") from exc
    header = {"scenario_sha256": sc.sha256, "tool_version": __version__, "subcommand": name}
    for t in tables:
        t.metadata = {**header, **t.metadata}
    return tables
