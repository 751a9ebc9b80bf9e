"""Exact moment formulas, Bernoulli machinery, asymptotic regime."""

import math
from fractions import Fraction

import pytest

from conftest import oracle_moment
from shufflestats import (
    ALPHA_THRESHOLD,
    AsymptoticSeries,
    UserInputError,
    asymptotic_mean_c,
    asymptotic_variance_c,
    bernoulli_closed_forms,
    bernoulli_number,
    bernoulli_numbers,
    bernoulli_tail_bound,
    bernoulli_tail_exact,
    estimate0_deviation,
    falling_factorial,
    mean_c_bernoulli,
    mean_c_exact,
    mean_d_C,
    moments_c_C,
    moments_d_R,
    power_sum,
    power_sum_bernoulli,
    second_moment_c_exact,
    second_moment_d_C,
    use1_mean,
    variance_c_exact,
    variance_d_C,
)

F = Fraction


class TestExactMoments:
    @pytest.mark.parametrize("n", range(2, 7))
    @pytest.mark.parametrize("k", range(1, 9))
    def test_cut_moments_vs_oracle(self, k, n):
        assert mean_c_exact(k, n) == oracle_moment("C", k, n, "c", 1)
        assert second_moment_c_exact(k, n) == oracle_moment("C", k, n, "c", 2)
        assert mean_d_C(k, n) == oracle_moment("C", k, n, "d", 1)
        assert second_moment_d_C(k, n) == oracle_moment("C", k, n, "d", 2)

    @pytest.mark.parametrize("n", range(1, 7))
    @pytest.mark.parametrize("k", range(1, 9))
    def test_shuffle_moments_vs_oracle(self, k, n):
        report = moments_d_R(k, n)
        e1 = oracle_moment("R", k, n, "d", 1)
        e2 = oracle_moment("R", k, n, "d", 2)
        assert report.mean_exact == e1
        assert report.second_exact == e2
        assert report.variance_exact == e2 - e1 * e1

    @pytest.mark.parametrize("n", range(2, 7))
    @pytest.mark.parametrize("k", range(1, 9))
    def test_derived_identities_against_enumeration(self, k, n):
        # both sides computed from the enumeration oracle alone
        e_c1 = oracle_moment("C", k, n, "c", 1)
        e_c2 = oracle_moment("C", k, n, "c", 2)
        e_d1 = oracle_moment("C", k, n, "d", 1)
        e_d2 = oracle_moment("C", k, n, "d", 2)
        assert e_d1 == F(n - 1, n) * e_c1
        assert e_d2 == (1 - F(2, n)) * e_c2 + e_c1 / n
        assert use1_mean(k, n) == (e_c2 - e_c1) / n

    def test_frozen_values(self):
        assert mean_c_exact(2, 3) == F(5, 4)
        assert mean_c_exact(1, 5) == 1
        assert mean_c_exact(2, 2) == 1
        assert second_moment_c_exact(2, 3) == F(7, 4)
        assert second_moment_c_exact(1, 4) == 1
        assert mean_d_C(2, 3) == F(5, 6)
        assert mean_d_C(1, 7) == F(6, 7)
        assert use1_mean(2, 3) == F(1, 6)
        assert variance_c_exact(2, 3) == F(7, 4) - F(25, 16)
        assert variance_d_C(2, 3) == second_moment_d_C(2, 3) - F(25, 36)

    def test_shuffle_side_frozen_values(self):
        rep = moments_d_R(2, 2)
        assert rep.mean_exact == F(1, 4)
        assert rep.variance_exact == F(3, 16)
        degenerate = moments_d_R(1, 6)
        assert degenerate.mean_exact == 0
        assert degenerate.variance_exact == 0

    def test_validation(self):
        with pytest.raises(UserInputError):
            mean_c_exact(2, 1)
        with pytest.raises(UserInputError):
            mean_c_exact(0, 4)


class TestBernoulli:
    def test_small_values(self):
        assert bernoulli_number(0) == 1
        assert bernoulli_number(1) == F(-1, 2)
        assert bernoulli_number(2) == F(1, 6)
        assert bernoulli_number(4) == F(-1, 30)
        assert bernoulli_number(12) == F(-691, 2730)

    def test_odd_values_vanish(self):
        for t in range(3, 32, 2):
            assert bernoulli_number(t) == 0

    def test_shared_cache_grows(self):
        cache = bernoulli_numbers(6)
        assert cache.value(6) == F(1, 42)
        assert bernoulli_numbers(80).value(6) == F(1, 42)

    def test_falling_factorial(self):
        for n in range(0, 9):
            for t in range(0, n + 1):
                assert falling_factorial(n, t) == math.perm(n, t)
        assert falling_factorial(4, 6) == 0

    @pytest.mark.parametrize("p", range(1, 13))
    def test_power_sum_routes_agree(self, p):
        # both routes compute sum of r^p over 0 <= r < a
        for a in range(1, 11):
            direct = power_sum(p, a)
            assert power_sum_bernoulli(p, a) == direct
            assert direct == sum(r**p for r in range(a))

    def test_power_sum_zeroth_power(self):
        # 0^0 counts as 1, so the p = 0 sum over r < a is a itself
        assert power_sum(0, 7) == 7
        assert power_sum(0, 0) == 0

    @pytest.mark.parametrize("n", range(2, 21))
    def test_series_route_matches_exact_mean(self, n):
        for k in (1, 2, 3, 7, n, 3 * n):
            assert mean_c_bernoulli(k, n) == mean_c_exact(k, n)

    def test_series_terms_structure(self):
        series = AsymptoticSeries.build(4, 9)
        assert len(series.terms) == 9
        assert series.terms[0] == 1
        assert all(series.terms[t] == 0 for t in range(3, 9, 2))
        assert series.tail_sum(start=9) == 0


class TestElementaryEstimates:
    @pytest.mark.parametrize("n", [2, 5, 10, 50, 100, 200])
    def test_deviation_bound_holds(self, n):
        for t in range(0, min(n, 10) + 1):
            lhs, rhs = estimate0_deviation(n, t)
            assert lhs <= rhs

    def test_deviation_validation(self):
        with pytest.raises(UserInputError):
            estimate0_deviation(3, 4)

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0, 2.0])
    @pytest.mark.parametrize("l", [0, 2, 4])
    def test_tail_bound_dominates_tail(self, alpha, l):
        for start in (1, 3):
            exact = bernoulli_tail_exact(alpha, l, start)
            bound = bernoulli_tail_bound(alpha, l, start)
            assert 0 <= exact <= bound

    def test_tail_bound_rejects_divergent_regime(self):
        with pytest.raises(UserInputError):
            bernoulli_tail_bound(0.1, 0, 1)


class TestAsymptotics:
    def test_threshold_constant(self):
        assert ALPHA_THRESHOLD == pytest.approx(1 / (2 * math.pi), rel=1e-15)

    def test_closed_forms_at_one(self):
        parts = bernoulli_closed_forms(1.0)
        assert parts[0] == pytest.approx(0.5819767, abs=5e-7)
        assert parts[1] == pytest.approx(0.0754738, abs=5e-7)
        assert parts[2] == pytest.approx(-0.3386969, abs=5e-7)
        assert parts[3] == pytest.approx(-0.0148142, abs=5e-7)

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 1.0, 2.0, 10.0])
    def test_closed_forms_self_certify(self, alpha):
        # the routine raises CertificationError if any closed form
        # disagrees with its series evaluation; reaching here is the test
        parts = bernoulli_closed_forms(alpha)
        assert len(parts) == 4

    def test_closed_forms_reject_divergent_alpha(self):
        with pytest.raises(UserInputError):
            bernoulli_closed_forms(0.1)

    def test_mean_slope_and_intercept_at_one(self):
        m, s = asymptotic_mean_c(1.0)
        assert float(m) == pytest.approx(0.4180232931, abs=1e-9)
        assert float(s) == pytest.approx(0.07547378935, abs=1e-9)

    def test_variance_slope_at_one(self):
        v = asymptotic_variance_c(1.0)
        assert float(v) == pytest.approx(0.07303372714, abs=1e-9)

    def test_limits_at_large_alpha(self):
        m, _ = asymptotic_mean_c(1e6)
        assert abs(float(m) - 0.5) < 1e-6
        v = asymptotic_variance_c(1e6)
        assert abs(float(v) - 1 / 12) < 1e-6

    def test_asymptotics_reject_divergent_alpha(self):
        with pytest.raises(UserInputError):
            asymptotic_mean_c(ALPHA_THRESHOLD)
        with pytest.raises(UserInputError):
            asymptotic_variance_c(0.05)

    def test_mean_error_shrinks_linearly(self):
        m, s = asymptotic_mean_c(1.0)
        gaps = []
        for n in (50, 100, 200, 400):
            exact = float(mean_c_exact(n, n))
            gaps.append(n * abs(exact - (n * float(m) + float(s))))
        # n * |error| stays bounded if the remainder is O(1/n)
        assert max(gaps) <= 2 * gaps[0]

    def test_variance_error_stays_bounded(self):
        v = float(asymptotic_variance_c(1.0))
        first = abs(float(variance_c_exact(50, 50)) - 50 * v)
        last = abs(float(variance_c_exact(800, 800)) - 800 * v)
        assert last <= first + 1


class TestReports:
    def test_report_with_asymptotics(self):
        rep = moments_c_C(50, 50)
        assert rep.mean_asym is not None
        assert rep.error_mean is not None
        assert abs(rep.error_mean) < 1e-3
        payload = rep.to_json_dict()
        assert payload["k"] == 50
        assert payload["mean_exact"] == str(rep.mean_exact)
        assert isinstance(payload["mean_float"], float)

    def test_report_below_threshold_has_no_asymptotics(self):
        rep = moments_c_C(2, 100)
        assert rep.mean_asym is None
        assert rep.variance_asym is None
        assert rep.error_mean is None

    def test_shuffle_report_uses_shifted_cut_formulas(self):
        rep = moments_d_R(3, 5)
        assert rep.mean_exact == oracle_moment("R", 3, 5, "d", 1)
