import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arms_race_lab.contest import (
    AmplificationSpec,
    ErosionFamily,
    ErosionSpec,
    ModelParams,
    breach_probability,
    payoff_attacker,
    payoff_defender,
)
from arms_race_lab.dynamics import simulate_discrete
from arms_race_lab.equilibrium import (
    ProvocationStatus,
    adoption_gain,
    attacker_best_response,
    defender_best_response,
    defender_interior_response,
    foc_residuals,
    interior_breach,
    provocation_threshold,
    reduced_attacker_objective,
    solve_equilibrium,
    uniqueness_check,
)
from arms_race_lab.errors import CornerBranchError, DomainError

from .conftest import log_hyp, rel_close


def worked(V=10.0, q0=0.5, **kw):
    return ModelParams(q0=q0, V=V, c_d=1.0, delta=ErosionSpec(delta0=1.0), s=1.0, **kw)


def grid_argmax(f, lo, hi, n):
    x = np.linspace(lo, hi, n)
    y = np.array([f(v) for v in x])
    return x[int(np.argmax(y))], (hi - lo) / (n - 1)


class TestDefender:
    def test_worked_point(self):
        p = worked()
        assert defender_best_response(p, 0.0, 1.0) == pytest.approx((math.sqrt(2.5) - 1) / 0.5, rel=1e-14)
        assert defender_best_response(p, 0.0, 1.0) == pytest.approx(1.16228, abs=5e-6)

    def test_both_breach_forms_agree(self):
        p = worked()
        d = defender_best_response(p, 0.0, 1.0)
        via_contest = breach_probability(p, 0.0, d, 1.0)
        assert via_contest == pytest.approx(0.5 / math.sqrt(2.5), rel=1e-12)
        assert interior_breach(p, 0.0, 1.0) == pytest.approx(via_contest, rel=1e-12)
        assert interior_breach(p, 0.0, 1.0) == pytest.approx(math.sqrt(0.1), rel=1e-14)

    def test_clamped_corner(self):
        p = worked(V=1.0)
        assert defender_interior_response(p, 0.0, 1.0) < 0
        assert defender_best_response(p, 0.0, 1.0) == 0.0
        with pytest.raises(CornerBranchError):
            interior_breach(p, 0.0, 1.0)

    def test_breach_scalings(self):
        p = worked()
        assert interior_breach(p.replace(V=40.0), 0.0, 1.0) == pytest.approx(interior_breach(p, 0.0, 1.0) / 2)
        halved = p.replace(V=40.0, delta=ErosionSpec(delta0=0.5))
        assert interior_breach(halved, 0.0, 1.0) == pytest.approx(interior_breach(p.replace(V=40.0), 0.0, 1.0) * math.sqrt(2))

    @given(st.floats(0.05, 0.95), st.floats(0.5, 30.0), st.floats(0.0, 5.0), st.floats(0.1, 5.0))
    def test_matches_grid_search(self, q0, V, a, beta):
        p = log_hyp(q0=q0, V=V, beta=beta)
        d_star = defender_best_response(p, a, p.s)
        d_grid, step = grid_argmax(lambda d: payoff_defender(p, a, d, p.s), 0.0, p.d_max, 20001)
        assert abs(d_star - d_grid) <= step
        if d_star > 0:
            # first-order condition holds at the interior optimum
            h = 1e-6
            fd = (payoff_defender(p, a, d_star + h, p.s) - payoff_defender(p, a, d_star - h, p.s)) / (2 * h)
            assert abs(fd) < 1e-5 * max(1.0, p.V)

    def test_negative_effort_rejected(self):
        with pytest.raises(DomainError):
            defender_best_response(worked(), -1.0, 1.0)


class TestAttacker:
    def test_cost_dominates(self):
        p = log_hyp(B=0.01, c_a=100.0)
        assert attacker_best_response(p, 0.0, 1.0) == 0.0

    def test_fixed_cost_above_stake(self):
        p = log_hyp(F=11.0)
        for d in (0.0, 1.0, 5.0):
            assert attacker_best_response(p, d, 1.0) == 0.0

    @pytest.mark.parametrize("d", [0.0, 0.3, 1.0, 4.0])
    def test_matches_grid_search(self, fig1_mid, d):
        p = fig1_mid
        a_star = attacker_best_response(p, d, p.s)
        a_grid, step = grid_argmax(lambda a: payoff_attacker(p, a, d, p.s), 0.0, p.a_max, 100001)
        assert abs(a_star - a_grid) <= step
        assert payoff_attacker(p, a_star, d, p.s) >= payoff_attacker(p, a_grid, d, p.s) - 1e-12

    def test_non_monotone_in_defense(self, fig1_mid):
        p = fig1_mid
        responses = [attacker_best_response(p, d, p.s) for d in np.linspace(0, p.d_max, 41)]
        k = int(np.argmax(responses))
        assert 0 < k < len(responses) - 1
        assert responses[k] > responses[0] and responses[k] > responses[-1]

    def test_no_defense_uses_amplification_only(self, fig1_mid):
        p = fig1_mid
        # with d = 0 the payoff is B q(a) - c_a a, erosion plays no role
        other = p.replace(delta=ErosionSpec(beta=8.0))
        assert attacker_best_response(p, 0.0, p.s) == pytest.approx(attacker_best_response(other, 0.0, p.s), rel=1e-12)


class TestReducedObjective:
    def test_value_at_zero(self):
        p = worked(B=10.0, c_a=1.0)
        assert reduced_attacker_objective(p, 0.0, 1.0) == pytest.approx(10 * math.sqrt(0.1), rel=1e-14)
        assert reduced_attacker_objective(p, 0.0, 1.0) == pytest.approx(3.1623, abs=5e-5)

    def test_slope_eventually_below_half_cost(self):
        p = log_hyp(V=1e4)
        a = np.linspace(40.0, 60.0, 5)
        slopes = [(reduced_attacker_objective(p, x + 1e-4, p.s) - reduced_attacker_objective(p, x - 1e-4, p.s)) / 2e-4
                  for x in a]
        assert all(s <= -p.c_a / 2 for s in slopes)


class TestUniqueness:
    def test_log_hyperbolic_certified(self):
        assert uniqueness_check(log_hyp()).certified

    def test_powerlaw_k_one_certified(self):
        p = log_hyp().replace(delta=ErosionSpec(ErosionFamily.POWER_LAW, beta=1.5, k=1.0))
        assert uniqueness_check(p).certified

    def test_powerlaw_k_above_one_not_certified(self):
        p = log_hyp().replace(delta=ErosionSpec(ErosionFamily.POWER_LAW, beta=1.5, k=2.0, allow_k_above_one=True))
        rep = uniqueness_check(p)
        assert not rep.certified and "erosion_condition" in rep.failed

    def test_exponential_not_certified(self):
        p = log_hyp().replace(delta=ErosionSpec(ErosionFamily.EXPONENTIAL, beta=1.5))
        assert not uniqueness_check(p).certified


class TestSolve:
    def test_attacker_without_stake(self):
        p = log_hyp(B=0.0)
        eq = solve_equilibrium(p)
        assert eq.a_star == 0.0
        assert eq.d_star == pytest.approx(defender_best_response(p, 0.0, p.s), rel=1e-12)

    def test_defender_without_stake(self):
        p = log_hyp(V=0.0)
        eq = solve_equilibrium(p)
        assert eq.d_star == 0.0
        assert eq.a_star == pytest.approx(attacker_best_response(p, 0.0, p.s), rel=1e-9)

    def test_matches_dynamics(self, fig1_mid):
        eq = solve_equilibrium(fig1_mid)
        traj = simulate_discrete(fig1_mid, fig1_mid.s, (0.0, 0.0))
        assert eq.interior and traj.converged
        assert abs(eq.d_star - traj.final[0]) < 1e-6
        assert abs(eq.a_star - traj.final[1]) < 1e-6

    def test_first_order_conditions(self, fig1_mid):
        eq = solve_equilibrium(fig1_mid)
        fd, fa = foc_residuals(fig1_mid, eq)
        assert abs(fd) < 1e-9 and abs(fa) < 1e-9

    @pytest.mark.parametrize("V,B,c_d,c_a", [(10, 10, 1, 1), (10, 5, 1, 1), (15, 8, 1, 1), (20, 10, 1.5, 0.7)])
    def test_ratio_at_equilibrium(self, V, B, c_d, c_a):
        # both first-order conditions together pin R = (c_a / B) / (c_d / V)
        p = log_hyp(V=V, B=B, c_d=c_d, c_a=c_a)
        eq = solve_equilibrium(p)
        assert eq.interior
        assert rel_close(eq.r_at_eq, (c_a / B) / (c_d / V), 1e-8)

    def test_equilibrium_is_mutual_best_response(self, fig1_mid):
        eq = solve_equilibrium(fig1_mid)
        assert defender_best_response(fig1_mid, eq.a_star, fig1_mid.s) == pytest.approx(eq.d_star, abs=1e-9)
        assert attacker_best_response(fig1_mid, eq.d_star, fig1_mid.s) == pytest.approx(eq.a_star, abs=1e-7)

    def test_zero_signal_rejected(self):
        with pytest.raises(DomainError):
            solve_equilibrium(log_hyp(), s_eff=0.0)


class TestProvocation:
    def test_fixed_cost_above_stake(self):
        assert provocation_threshold(log_hyp(F=11.0)).status is ProvocationStatus.NEVER_ADOPTS

    def test_no_fixed_cost(self):
        assert provocation_threshold(log_hyp(F=0.0)).status is ProvocationStatus.ALWAYS_ADOPTS

    def test_interior_threshold(self):
        p = log_hyp(F=0.5)
        res = provocation_threshold(p)
        assert res.status is ProvocationStatus.THRESHOLD
        assert abs(adoption_gain(p, res.d_hat, p.s)) < 1e-8
        # dense-grid oracle: the first grid point with a positive gain sits just above d_hat
        grid = np.linspace(0.0, 2 * res.d_hat, 2001)
        first = next(d for d in grid if adoption_gain(p, d, p.s) >= 0)
        assert abs(first - res.d_hat) <= grid[1] - grid[0]

    def test_non_adoption_below_threshold(self):
        p = log_hyp(F=0.5)
        res = provocation_threshold(p)
        assert attacker_best_response(p, 0.5 * res.d_hat, p.s) == 0.0
        assert attacker_best_response(p, 1.5 * res.d_hat, p.s) > 0.0


def test_saturating_family_solves():
    p = ModelParams(q0=0.3, h=AmplificationSpec("saturating", alpha=1.0, saturation=0.5),
                    delta=ErosionSpec(beta=1.0))
    eq = solve_equilibrium(p)
    fd, fa = foc_residuals(p, eq)
    assert eq.interior and abs(fd) < 1e-8 and abs(fa) < 1e-8
