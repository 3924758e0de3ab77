import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arms_race_lab.contest import (
    AmplificationFamily,
    AmplificationSpec,
    ErosionFamily,
    ErosionSpec,
    ModelParams,
    adversarial_discount,
    adversarial_leverage,
    attacker_marginal,
    attacker_marginal_breakdown,
    breach_probability,
    contest_denominator,
    defender_marginal,
    eval_delta,
    eval_h,
    payoff_attacker,
    payoff_defender,
)
from arms_race_lab.errors import DomainError

from . import oracles
from .conftest import efforts, params, rel_close

LOG = AmplificationFamily.LOGARITHMIC
SAT = AmplificationFamily.SATURATING
HYP = ErosionFamily.HYPERBOLIC
POW = ErosionFamily.POWER_LAW
EXP = ErosionFamily.EXPONENTIAL


class TestFamilies:
    def test_log_at_zero(self):
        assert eval_h(AmplificationSpec(LOG, alpha=0.5), 0.0) == 1.0

    def test_log_at_e_minus_one(self):
        assert eval_h(AmplificationSpec(LOG, alpha=0.5), math.e - 1) == pytest.approx(1.5, rel=1e-15)

    def test_saturating_limit(self):
        assert eval_h(AmplificationSpec(SAT, alpha=2, saturation=1), 1e9) == pytest.approx(3.0, rel=1e-8)

    def test_hyperbolic_values(self):
        spec = ErosionSpec(HYP, delta0=1, beta=1)
        assert eval_delta(spec, 0.0) == 1.0
        assert eval_delta(spec, 1.0) == 0.5

    def test_powerlaw_value(self):
        spec = ErosionSpec(POW, delta0=0.8, beta=2, k=0.5)
        assert eval_delta(spec, 1.25) == pytest.approx(0.8 / math.sqrt(3.5), rel=1e-14)
        assert eval_delta(spec, 1.25) == pytest.approx(0.42761, abs=1e-5)

    def test_powerlaw_k_above_one_needs_override(self):
        with pytest.raises(DomainError):
            ErosionSpec(POW, k=1.5)
        assert ErosionSpec(POW, k=1.5, allow_k_above_one=True).k == 1.5

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_alpha_must_be_positive_finite(self, bad):
        with pytest.raises(DomainError):
            AmplificationSpec(LOG, alpha=bad)

    def test_delta0_range(self):
        with pytest.raises(DomainError):
            ErosionSpec(HYP, delta0=1.5)
        with pytest.raises(DomainError):
            ErosionSpec(HYP, delta0=0.0)

    @pytest.mark.parametrize("spec", [
        AmplificationSpec(LOG, alpha=0.7), AmplificationSpec(SAT, alpha=0.7, saturation=2.0),
    ])
    def test_amplification_derivatives_match_finite_differences(self, spec):
        for a in (0.0, 0.3, 2.0, 11.0):
            h = 1e-6
            lo = max(a - h, 0.0)
            fd = (spec.value(a + h) - spec.value(lo)) / (a + h - lo)
            assert spec.slope(a) == pytest.approx(fd, rel=1e-5)
            fd2 = (spec.slope(a + h) - spec.slope(lo)) / (a + h - lo)
            assert spec.curvature(a) == pytest.approx(fd2, rel=1e-4)

    def test_amplification_slope_at_zero_is_alpha(self):
        for fam in AmplificationFamily:
            assert AmplificationSpec(fam, alpha=0.7).slope(0.0) == pytest.approx(0.7)

    @pytest.mark.parametrize("spec", [
        ErosionSpec(HYP, delta0=0.8, beta=1.3),
        ErosionSpec(POW, delta0=0.8, beta=1.3, k=0.6),
        ErosionSpec(EXP, delta0=0.8, beta=1.3),
    ])
    def test_erosion_derivatives_match_finite_differences(self, spec):
        for a in (0.0, 0.4, 3.0):
            h = 1e-6
            lo = max(a - h, 0.0)
            assert spec.slope(a) == pytest.approx((spec.value(a + h) - spec.value(lo)) / (a + h - lo), rel=1e-5)
            assert spec.curvature(a) == pytest.approx((spec.slope(a + h) - spec.slope(lo)) / (a + h - lo), rel=1e-4)

    def test_families_accept_arrays(self):
        a = np.linspace(0, 5, 7)
        for fam in AmplificationFamily:
            assert AmplificationSpec(fam).value(a).shape == a.shape
        for fam in ErosionFamily:
            assert ErosionSpec(fam).value(a).shape == a.shape

    def test_uniqueness_guarantee_by_family(self):
        assert ErosionSpec(HYP).uniqueness_guarantee
        assert ErosionSpec(POW, k=1.0).uniqueness_guarantee
        assert not ErosionSpec(POW, k=1.2, allow_k_above_one=True).uniqueness_guarantee
        assert not ErosionSpec(EXP).uniqueness_guarantee


class TestBreach:
    def test_status_quo_exact(self):
        p = ModelParams(q0=0.3)
        for s in (0.0, 1.0, 7.5):
            assert breach_probability(p, 0.0, 0.0, s) == 0.3

    def test_worked_point(self):
        # h(a) = 2 and delta(a) d s = 1 at q0 = 0.5
        a = math.e - 1
        p = ModelParams(q0=0.5, h=AmplificationSpec(LOG, alpha=1.0), delta=ErosionSpec(HYP, beta=1e-300))
        d = 1.0 / eval_delta(p.delta, a)
        assert breach_probability(p, a, d, 1.0) == pytest.approx(0.5, rel=1e-12)
        assert contest_denominator(p, a, d, 1.0) == pytest.approx(2.0, rel=1e-12)

    def test_defense_dominates(self):
        p = ModelParams(q0=0.5, delta=ErosionSpec(HYP, delta0=1.0))
        assert breach_probability(p, 0.0, 1e9, 1.0) < 1e-8

    def test_denominator_status_quo(self):
        assert contest_denominator(ModelParams(q0=0.5), 0.0, 0.0, 1.0) == 1.0
        assert contest_denominator(ModelParams(q0=0.3), 0.0, 0.0, 1.0) == 1.0

    def test_negative_inputs_rejected(self):
        p = ModelParams()
        with pytest.raises(DomainError):
            breach_probability(p, -1.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            breach_probability(p, 0.0, -1.0, 1.0)

    def test_discount_and_leverage(self):
        assert adversarial_discount(ErosionSpec(HYP, beta=3.0), 0.0) == 1.0
        assert adversarial_discount(ErosionSpec(HYP, beta=1.0), 1.0) == 0.5
        assert adversarial_discount(ErosionSpec(HYP, beta=4.0), 1.0) == pytest.approx(0.2)
        p = ModelParams(h=AmplificationSpec(LOG, alpha=0.5), delta=ErosionSpec(HYP, delta0=1.0, beta=1.0))
        assert adversarial_leverage(p, 0.0) == 1.0
        assert adversarial_leverage(p, math.e - 1) == pytest.approx(1.5 * math.e, rel=1e-12)
        assert adversarial_leverage(p.replace(delta=ErosionSpec(HYP, delta0=0.5)), 0.0) == 2.0


class TestPayoffs:
    def test_defender_status_quo(self):
        assert payoff_defender(ModelParams(V=10, q0=0.3), 0.0, 0.0, 1.0) == pytest.approx(-3.0)

    def test_fixed_cost_off_at_zero(self):
        p = ModelParams(B=10, F=2, q0=0.3)
        assert payoff_attacker(p, 0.0, 0.0, 1.0) == pytest.approx(3.0)

    def test_attacker_arithmetic(self):
        # q = 0.5 at a = 1 when h(1) = 1 + alpha ln 2 is matched by the defense term
        p = ModelParams(q0=0.5, h=AmplificationSpec(LOG, alpha=1 / math.log(2)), B=10, c_a=1, F=2)
        d = 1.0 / eval_delta(p.delta, 1.0)
        assert breach_probability(p, 1.0, d, 1.0) == pytest.approx(0.5, rel=1e-12)
        assert payoff_attacker(p, 1.0, d, 1.0) == pytest.approx(2.0, rel=1e-12)


class TestMarginals:
    def test_no_erosion_term_without_defense(self):
        p = ModelParams()
        for a in (0.0, 0.5, 3.0):
            assert attacker_marginal_breakdown(p, a, 0.0, 1.0).erosion_term == 0.0

    def test_status_quo_total(self):
        p = ModelParams(q0=0.5, h=AmplificationSpec(LOG, alpha=0.5))
        assert attacker_marginal_breakdown(p, 0.0, 0.0, 1.0).total == pytest.approx(0.125, rel=1e-15)

    @given(params, efforts, efforts)
    def test_total_at_least_amplification(self, p, a, d):
        b = attacker_marginal_breakdown(p, a, d, p.s)
        assert b.erosion_term >= 0
        assert b.total >= b.amplification_term
        assert b.total == pytest.approx(attacker_marginal(p, a, d, p.s), rel=1e-12)

    @given(params, st.floats(0.01, 10.0), st.floats(0.01, 10.0))
    def test_marginals_match_high_precision_differences(self, p, a, d):
        assert rel_close(attacker_marginal(p, a, d, p.s), oracles.dq_da(p, a, d, p.s), 1e-10)
        assert rel_close(defender_marginal(p, a, d, p.s), -oracles.dq_dd(p, a, d, p.s), 1e-10)

    @given(params, efforts, efforts)
    def test_breach_matches_high_precision_oracle(self, p, a, d):
        q = breach_probability(p, a, d, p.s)
        assert 0.0 <= q < 1.0
        assert rel_close(q, float(oracles.breach_mp(p, a, d, p.s)), 1e-13)
