import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from trunctail import (TruncatedWalkModel, cl_bound, mgf_upper_bound_thm1, mgf_upper_bound_thm2,
                       pareto_shift, theorem1_bound, theorem1_bound_all_y, theorem1_bound_sharper,
                       theorem1_certificate, theorem2_bound, theorem2_certificate, weibull_shift)
from trunctail.bounds import find_y_kappa, log_theorem1_bound, log_theorem2_bound
from trunctail.errors import ConfigError, HypothesisViolation, ThresholdViolation

import oracles


@pytest.fixture(scope="module")
def cert1(pareto_unit_mean):
    return theorem1_certificate(pareto_unit_mean.moments(2.0))


@pytest.fixture(scope="module")
def cert2(weibull_half):
    return theorem2_certificate(weibull_half, weibull_half.moments(2.0), 0.5, 0.49)


class TestTheorem1Certificate:
    def test_K_recomposition(self, pareto32):
        """beta = 2.5 gives delta = 2, where ME = MG = 1/2 exactly."""
        cert = theorem1_certificate(pareto32.moments(2.5))
        m2p = float(oracles.pareto_moment_mp(3, 2, 2, "+"))
        m2m = float(oracles.pareto_moment_mp(3, 2, 2, "-"))
        assert cert.K == pytest.approx(m2m * 0.5 + math.exp(2.5) * 0.5 * m2p, rel=1e-10)
        assert cert.L == pytest.approx(float(oracles.pareto_moment_mp(3, 2, 2.5, "+")), rel=1e-10)

    def test_threshold_formula(self, pareto32):
        cert = theorem1_certificate(pareto32.moments(2.5))
        b, d = 2.5, 2.0
        top = cert.L + cert.K * ((b - 1) / (d - 1) * d / math.e) ** d
        assert cert.log_y_beta == pytest.approx(top / ((b - 1) * 0.5), rel=1e-14)
        assert cert.C_max == pytest.approx((d / ((d - 1) * math.e)) ** d, rel=1e-15)

    def test_Q_negative_just_above_threshold(self, cert1):
        assert cert1.Q_of_y(cert1.y_beta * (1 + 1e-9)) < 0

    @pytest.mark.parametrize("beta", [1.3, 1.7, 2.0, 2.5])
    def test_Q_negative_on_grid(self, pareto_unit_mean, beta):
        cert = theorem1_certificate(pareto_unit_mean.moments(beta))
        for y in np.geomspace(cert.y_beta * (1 + 1e-6), cert.y_beta * 1e6, 100):
            assert cert.Q_of_y(y) < 0

    def test_taylor_modes_order_thresholds(self, pareto_unit_mean):
        m = pareto_unit_mean.moments(1.6)
        ys = [theorem1_certificate(m, mode).log_y_beta for mode in ("exact", "closed", "simple")]
        assert ys[0] < ys[1] < ys[2]

    def test_to_dict(self, cert1):
        d = cert1.to_dict()
        assert d["kind"] == "theorem1"
        assert d["y_beta"] == float(f"{cert1.y_beta:.15g}")

    def test_rate(self, cert1):
        assert cert1.rate(100.0) == pytest.approx(math.log(100.0) / 100.0, rel=1e-15)


class TestTheorem1Bound:
    def test_zero_level(self, cert1):
        assert theorem1_bound(cert1, 0.0, 10.0) == 1.0

    def test_closed_form_beta_two(self, cert1):
        k = 3.0
        y = math.exp(k)
        for x in (1.0, 10.0, 100.0):
            assert theorem1_bound(cert1, x, y) == pytest.approx(math.exp(-k * x * math.exp(-k)),
                                                               rel=1e-14)

    def test_threshold_violation(self, cert1):
        with pytest.raises(ThresholdViolation):
            theorem1_bound(cert1, 1.0, cert1.y_beta * 0.99)
        with pytest.raises(ValueError):
            theorem1_bound(cert1, -1.0, 10.0)

    def test_log_space(self, pareto32):
        cert = theorem1_certificate(pareto32.moments(2.0))
        assert log_theorem1_bound(cert, 1e6, 100.0) == pytest.approx(-1e4 * math.log(100), rel=1e-15)
        assert theorem1_bound(cert, 1e6, 100.0) == 0.0

    def test_all_y_identities(self, cert1):
        yb = cert1.y_beta
        assert theorem1_bound_all_y(cert1, 5.0, yb) == pytest.approx(1.0, abs=1e-15)
        assert theorem1_bound_all_y(cert1, yb ** 2, yb ** 2) == pytest.approx(yb ** -1.0, rel=1e-12)
        assert theorem1_bound_all_y(cert1, 10.0, 0.5 * yb) == 1.0

    def test_all_y_dominates(self, cert1):
        for y in np.geomspace(cert1.y_beta * 1.01, 1e4, 40):
            for x in (1.0, 30.0, 300.0):
                plain = theorem1_bound(cert1, x, y)
                allv = theorem1_bound_all_y(cert1, x, y)
                assert allv >= plain
                assert allv == pytest.approx(plain * cert1.y_beta ** ((cert1.beta - 1) * x / y),
                                             rel=1e-12)

    def test_cl_dominated(self, cert1, pareto_unit_mean):
        for y in (cert1.y_beta * 1.5, 20.0, 200.0):
            m = TruncatedWalkModel(pareto_unit_mean, y)
            for x in (1.0, 10.0, 100.0):
                assert cl_bound(m, x) <= theorem1_bound(cert1, x, y)


@pytest.fixture(scope="module")
def sharp(pareto_unit_mean):
    return theorem1_certificate(pareto_unit_mean.moments(2.0), sharper_offset_xi=0.5,
                                sharper_threshold=50.0)


class TestSharper:
    def test_zero(self, sharp):
        assert theorem1_bound_sharper(sharp, 0.0, 100.0) == 1.0

    def test_ratio(self, sharp):
        for y in (60.0, 200.0, 1e4):
            for x in (5.0, 50.0):
                ratio = theorem1_bound_sharper(sharp, x, y) / theorem1_bound(sharp, x, y)
                assert ratio == pytest.approx((math.log(y) * math.exp(0.5)) ** (-x / y), rel=1e-12)
                assert ratio <= 1.0

    def test_gating(self, sharp, pareto_unit_mean):
        with pytest.raises(ThresholdViolation):
            theorem1_bound_sharper(sharp, 1.0, 40.0)
        with pytest.raises(HypothesisViolation) as info:
            theorem1_certificate(pareto_unit_mean.moments(2.0), sharper_offset_xi=1.0,
                                 sharper_threshold=50.0)
        assert info.value.clause == "sharper_offset_xi"
        with pytest.raises(ConfigError):
            theorem1_certificate(pareto_unit_mean.moments(2.0), sharper_offset_xi=0.5)

    def test_sharper_rate_below_gamma(self, sharp, pareto_unit_mean):
        for y in (60.0, 200.0, 1000.0):
            assert TruncatedWalkModel(pareto_unit_mean, y).gamma >= sharp.sharper_rate(y)


class TestIntermediateInequalities:
    @settings(max_examples=200, deadline=None)
    @given(st.floats(1.05, 3.0), st.floats(1.001, 1e12))
    def test_power_bound(self, beta, y):
        """(beta-1) s1^{delta-1} log y <= ((beta-1)/(delta-1) delta/e)^delta."""
        delta = min(2.0, beta)
        s1 = (beta - 1) * math.log(y) / y
        lhs = (beta - 1) * s1 ** (delta - 1) * math.log(y)
        rhs = ((beta - 1) / (delta - 1) * delta / math.e) ** delta
        assert lhs <= rhs * (1 + 1e-12)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1.05, 3.0), st.floats(1.001, 1e12))
    def test_remainder_bound(self, beta, y):
        """0 <= (e^{sy} - 1 - sy) / (s y^beta) <= 1 / ((beta-1) log y) at s = s1(y)."""
        s = (beta - 1) * math.log(y) / y
        sy = s * y
        rem = math.expm1(sy) - sy
        val = rem / (s * y ** beta)
        assert 0 <= val <= 1 / ((beta - 1) * math.log(y)) * (1 + 1e-12)


class TestMGFBoundThm1:
    def test_decomposition(self, pareto_unit_mean, cert1):
        m = pareto_unit_mean.moments(2.0)
        y = 20.0
        assert mgf_upper_bound_thm1(m, y) == pytest.approx(1 + cert1.rate(y) * cert1.Q_of_y(y),
                                                           rel=1e-15)

    @pytest.mark.parametrize("spec, beta", [(pareto_shift(3.0, 2.5), 2.0),
                                            (pareto_shift(3.0, 2.0), 2.5),
                                            (weibull_shift(0.5, 7.0), 2.0)])
    def test_dominates_exact_mgf(self, spec, beta):
        m = spec.moments(beta)
        cert = theorem1_certificate(m)
        for y in (cert.y_beta * 2, cert.y_beta * 10):
            s = cert.rate(y)
            exact = TruncatedWalkModel(spec, y).mgf(s)
            bound = mgf_upper_bound_thm1(m, y, s)
            assert exact <= bound < 1.0

    def test_general_s(self, pareto_unit_mean):
        m = pareto_unit_mean.moments(2.0)
        model = TruncatedWalkModel(pareto_unit_mean, 30.0)
        for s in (0.01, 0.05, 0.1, 0.2):
            assert model.mgf(s) <= mgf_upper_bound_thm1(m, 30.0, s)

    def test_density_oracle(self, pareto_unit_mean):
        m = pareto_unit_mean.moments(2.0)
        cert = theorem1_certificate(m)
        y = 3 * cert.y_beta
        ref = float(oracles.pareto_density_mgf(3, 2.5, y, cert.rate(y)))
        assert ref <= mgf_upper_bound_thm1(m, y)


class TestTheorem2Certificate:
    def test_r(self, cert2):
        assert cert2.r == pytest.approx(math.log(0.5), rel=1e-14)

    def test_sup_clause_at_threshold(self, cert2):
        assert cert2.log_y_sup is not None and cert2.log_y_r == cert2.log_y_sup
        t = cert2.log_y_r
        lhs = t - (cert2.kappa * t) ** (cert2.kappa + 1)
        assert math.exp(lhs) <= math.exp(cert2.r - 1) + 1e-9
        # and the clause is active just below it
        t2 = t * (1 - 1e-6)
        assert t2 - (cert2.kappa * t2) ** (cert2.kappa + 1) >= cert2.r - 1

    def test_y_r_clauses(self, cert2):
        assert cert2.y_r >= math.exp(cert2.r)
        assert cert2.y_r >= cert2.y_kappa ** (1 / cert2.kappa)

    def test_eta_star_formula(self, cert2, weibull_half):
        mu2 = weibull_half.moments(2.0).mu2
        second = (math.e * mu2 / 2 / (1.0 * 0.5)) ** (1 / 0.49)
        assert cert2.y_eta_star == pytest.approx(max(cert2.y_r, second), rel=1e-12)

    def test_Q_nonpositive_twice_threshold(self, cert2):
        assert cert2.Q_of_y(2 * cert2.y_eta_star) <= 0

    def test_Q_negative_on_grid(self, cert2):
        for y in np.geomspace(cert2.y_eta_star * (1 + 1e-6), cert2.y_eta_star * 1e4, 100):
            assert cert2.Q_of_y(y) < 0

    def test_y_kappa_search(self, weibull_half, cert2):
        yk = find_y_kappa(weibull_half, 0.49)
        assert yk == cert2.y_kappa
        q = float(weibull_half.hazard_q(yk * 0.99))
        assert not (math.log(yk * 0.99) ** 1.49 <= q <= (yk * 0.99) ** 0.51)

    def test_to_dict(self, cert2):
        d = cert2.to_dict()
        assert d["kind"] == "theorem2" and d["y_eta_star"] == float(f"{cert2.y_eta_star:.15g}")


class TestTheorem2Hypotheses:
    def test_infinite_second_moment(self):
        spec = pareto_shift(1.8, 3.0)
        with pytest.raises(HypothesisViolation) as info:
            theorem2_certificate(spec, spec.moments(1.5), 0.5, 0.3, y_kappa=10.0)
        assert info.value.clause == "mu2_finite"

    @pytest.mark.parametrize("eta, kappa, clause", [(1.5, 0.3, "eta_range"), (0.5, 1.2, "kappa_range")])
    def test_ranges(self, weibull_half, eta, kappa, clause):
        with pytest.raises(HypothesisViolation) as info:
            theorem2_certificate(weibull_half, weibull_half.moments(2.0), eta, kappa, y_kappa=100.0)
        assert info.value.clause == clause

    def test_pareto_fails_lower_bound(self, pareto32):
        with pytest.raises(HypothesisViolation) as info:
            theorem2_certificate(pareto32, pareto32.moments(2.5), 0.5, 0.3, y_kappa=10.0)
        assert info.value.clause == "q_lower"
        with pytest.raises(HypothesisViolation) as info:
            theorem2_certificate(pareto32, pareto32.moments(2.5), 0.5, 0.3)
        assert info.value.clause == "q_bounds"

    def test_upper_bound_clause(self, weibull_half):
        # kappa = 0.6 asks for q <= y^0.4, false for q ~ y^0.5
        with pytest.raises(HypothesisViolation) as info:
            theorem2_certificate(weibull_half, weibull_half.moments(2.0), 0.5, 0.6, y_kappa=100.0)
        assert info.value.clause in ("q_upper", "q_lower")

    def test_y_kappa_below_one(self, weibull_half):
        with pytest.raises(HypothesisViolation) as info:
            theorem2_certificate(weibull_half, weibull_half.moments(2.0), 0.5, 0.49, y_kappa=0.5)
        assert info.value.clause == "y_kappa_range"


class TestTheorem2Bound:
    def test_zero(self, cert2, weibull_half):
        assert theorem2_bound(cert2, weibull_half, 0.0, 2 * cert2.y_eta_star) == 1.0

    def test_two_forms(self, cert2, weibull_half):
        for y in np.geomspace(cert2.y_eta_star * 1.01, cert2.y_eta_star * 100, 20):
            for x in (10.0, 1000.0):
                # (y P(X > y) / (eta |mu|))^{x/y}, in logs since P(X > y) underflows here
                direct = math.exp(x / y * (math.log(y) - float(weibull_half.hazard_q(y))
                                           - math.log(0.5 * 1.0)))
                assert theorem2_bound(cert2, weibull_half, x, y) == pytest.approx(direct, rel=1e-10)
                assert log_theorem2_bound(cert2, weibull_half, x, y) == pytest.approx(
                    -cert2.rate(y) * x, rel=1e-12)

    def test_threshold_violation(self, cert2, weibull_half):
        with pytest.raises(ThresholdViolation):
            theorem2_bound(cert2, weibull_half, 1.0, cert2.y_eta_star / 2)

    def test_certified_rate(self, weibull_c7):
        cert = theorem2_certificate(weibull_c7, weibull_c7.moments(2.0), 0.5, 0.49)
        for y in np.geomspace(cert.y_eta_star * 1.01, cert.y_eta_star * 30, 8):
            assert TruncatedWalkModel(weibull_c7, y).gamma >= cert.rate(y)


class TestMGFBoundThm2:
    def test_max_term_at_rate(self, cert2, weibull_half):
        y = 2 * cert2.y_eta_star
        s = cert2.rate(y)
        assert y * math.exp(s * y - float(weibull_half.hazard_q(y))) == pytest.approx(
            math.exp(cert2.r), rel=1e-9)
        m = weibull_half.moments(2.0)
        assert mgf_upper_bound_thm2(weibull_half, m, y, s) == pytest.approx(
            1 + s * cert2.Q_of_y(y), rel=1e-14)

    def test_dominates_exact_mgf(self, weibull_c7):
        m = weibull_c7.moments(2.0)
        cert = theorem2_certificate(weibull_c7, m, 0.5, 0.49)
        for y in (cert.y_eta_star * 1.1, cert.y_eta_star * 3, cert.y_eta_star * 10):
            s = cert.rate(y)
            exact = TruncatedWalkModel(weibull_c7, y).mgf(s)
            assert exact <= mgf_upper_bound_thm2(weibull_c7, m, y, s) < 1.0

    def test_decreasing_in_q(self, weibull_half):
        m = weibull_half.moments(2.0)
        heavier, lighter = weibull_half, weibull_shift(0.6, 3.0)
        for y, s in ((1e3, 0.01), (1e4, 0.002), (1e5, 3e-4)):
            assert (mgf_upper_bound_thm2(lighter, m, y, s)
                    <= mgf_upper_bound_thm2(heavier, m, y, s))

    def test_domain(self, weibull_half):
        m = weibull_half.moments(2.0)
        with pytest.raises(ValueError):
            mgf_upper_bound_thm2(weibull_half, m, 10.0, 0.05)
        with pytest.raises(ValueError):
            mgf_upper_bound_thm2(weibull_half, m, 10.0, 0.0)
