"""Tail-bound tests: constants, branches, exact-tail domination, moment checks."""

import math

import mpmath as mp
import pytest

from borelstein.borel import BorelParams
from borelstein.concentration import (
    biased_exp_moment,
    delta_limit,
    exact_tail,
    exp_moment_gap_check,
    lower_tail_bound,
    make_params,
    mgf_moment_check,
    optimize_delta,
    upper_tail_bound,
)
from borelstein.errors import DeltaOutOfRange

GRID = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
T_GRID = [0.25, 0.5, 1.0, 2.0, 4.0]


def oracle_K(lam, delta):
    with mp.workdps(40):
        lam, delta = mp.mpf(lam), mp.mpf(delta)
        first = (1 - lam) * mp.e**-delta / (
            lam * mp.sqrt(2 * mp.pi) * (1 - mp.e**-delta) ** 2
        )
        return float(lam / 2 * (first + 1 / (1 - lam) ** 2))


class TestParams:
    def test_gamma_value(self):
        params = make_params(0.5, 0.1)
        assert params.gamma == pytest.approx(0.5 + math.log(2.0) - 1.1, abs=1e-15)
        assert params.gamma == pytest.approx(0.09315, abs=5e-6)

    def test_K_value(self):
        params = make_params(0.5, 0.1)
        assert params.K == pytest.approx(oracle_K(0.5, 0.1), rel=1e-13)
        assert params.K == pytest.approx(10.96, abs=0.01)

    def test_delta_out_of_range(self):
        # feasible slack at lambda = 0.5 tops out near 0.19315
        with pytest.raises(DeltaOutOfRange):
            make_params(0.5, 0.2)
        with pytest.raises(DeltaOutOfRange):
            make_params(0.5, -0.01)

    @pytest.mark.parametrize("lam", GRID)
    def test_feasible_range_nonempty(self, lam):
        assert delta_limit(lam) > 0.0
        make_params(lam, delta_limit(lam) / 2.0)  # must not raise


class TestUpperTail:
    @pytest.mark.parametrize("lam", GRID)
    def test_breakpoint_continuity(self, lam):
        params = make_params(lam, delta_limit(lam) / 2.0)
        t_star = params.breakpoint
        gauss = math.exp(
            -params.lam * t_star**2 / (2.0 * params.K * (1.0 - params.lam) ** 2)
        )
        linear = math.exp(
            -params.gamma * t_star
            + params.K * params.gamma**2 * (1.0 - params.lam) ** 2 / (2.0 * params.lam)
        )
        assert abs(gauss - linear) <= 1e-12

    def test_dominates_exact_tail_at_example_point(self):
        params = make_params(0.5, 0.1)
        est = exact_tail(BorelParams(0.5), 1.0, "upper")
        assert est.value <= upper_tail_bound(params, 1.0) + est.error_bar

    def test_decays_at_linear_rate_for_large_t(self):
        params = make_params(0.5, 0.1)
        big, bigger = upper_tail_bound(params, 50.0), upper_tail_bound(params, 51.0)
        assert bigger / big == pytest.approx(math.exp(-params.gamma), rel=1e-9)
        assert upper_tail_bound(params, 1e4) < 1e-300 or upper_tail_bound(
            params, 1e4
        ) < big

    def test_rejects_nonpositive_t(self):
        with pytest.raises(ValueError):
            upper_tail_bound(make_params(0.5, 0.1), 0.0)


class TestLowerTail:
    def test_formula_value(self):
        assert lower_tail_bound(0.5) == pytest.approx(math.exp(-0.125), abs=1e-15)
        assert lower_tail_bound(0.5) == pytest.approx(0.88250, abs=5e-6)

    def test_dominates_exact_lower_tail(self):
        est = exact_tail(BorelParams(0.5), 0.5, "lower")
        assert est.value == pytest.approx(math.exp(-0.5), rel=1e-12)
        assert est.value <= lower_tail_bound(0.5)

    def test_vanishes_at_infinity(self):
        assert lower_tail_bound(40.0) < 1e-300


class TestExactTail:
    def test_lower_tail_below_support(self):
        # threshold under 1 leaves nothing: support starts at 1
        est = exact_tail(BorelParams(0.5), 0.51, "lower")
        assert est.value == 0.0

    def test_lower_tail_catches_first_atom(self):
        est = exact_tail(BorelParams(0.5), 0.5, "lower")
        assert est.value == pytest.approx(math.exp(-0.5), rel=1e-12)

    def test_upper_tail_monotone_in_t(self):
        p = BorelParams(0.4)
        values = [exact_tail(p, t, "upper").value for t in T_GRID]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_error_bar_semantics(self):
        p = BorelParams(0.3)
        est = exact_tail(p, 1.0, "upper")
        assert 0.0 <= est.error_bar < 1e-12
        with pytest.raises(ValueError):
            exact_tail(p, 1.0, "both")


class TestOptimizeDelta:
    def test_beats_midpoint_baseline(self):
        for lam in (0.3, 0.5, 0.8):
            for t in (0.5, 2.0):
                mid = delta_limit(lam) / 2.0
                baseline = upper_tail_bound(make_params(lam, mid), t)
                assert optimize_delta(lam, t).bound <= baseline + 1e-15

    def test_optimized_bound_still_dominates(self):
        est = exact_tail(BorelParams(0.5), 2.0, "upper")
        choice = optimize_delta(0.5, 2.0)
        assert est.value <= choice.bound + est.error_bar

    def test_bound_decreasing_in_t(self):
        values = [optimize_delta(0.3, t).bound for t in (0.5, 1.0, 2.0, 4.0)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_deterministic(self):
        a = optimize_delta(0.45, 1.5)
        b = optimize_delta(0.45, 1.5)
        assert a == b


class TestMomentChecks:
    def test_reference_points(self):
        assert mgf_moment_check(make_params(0.5, 0.1))
        assert mgf_moment_check(make_params(0.2, 0.3))

    def test_near_feasibility_edge(self):
        lam = 0.5
        delta = delta_limit(lam) - 1e-4  # gamma just above zero
        assert mgf_moment_check(make_params(lam, delta))

    @pytest.mark.parametrize("lam", GRID)
    def test_across_grid(self, lam):
        for frac in (0.25, 0.5, 0.75):
            assert mgf_moment_check(make_params(lam, frac * delta_limit(lam)))

    def test_biased_moment_against_mpmath(self):
        params = make_params(0.5, 0.1)
        got = biased_exp_moment(params)
        with mp.workdps(40):
            lam, gamma = mp.mpf(0.5), mp.mpf(params.gamma)
            oracle = (1 - lam) * mp.nsum(
                lambda j: mp.e ** ((gamma - lam) * j)
                * lam ** (j - 1)
                * j ** (j + 1)
                / mp.factorial(j),
                [1, mp.inf],
            )
        assert got == pytest.approx(float(oracle), rel=1e-10)

    @pytest.mark.parametrize("lam", [0.2, 0.5, 0.8])
    def test_exp_moment_gap(self, lam):
        params = make_params(lam, delta_limit(lam) / 2.0)
        assert exp_moment_gap_check(params)


class TestSeriesGuard:
    def test_divergent_series_trips_guard(self):
        from borelstein.concentration import _sum_series
        from borelstein.errors import SumDivergenceGuard

        with pytest.raises(SumDivergenceGuard):
            _sum_series(lambda j: 1e-9 * j, eps=1e-12, what="probe")

    def test_decaying_series_sums(self):
        from borelstein.concentration import _sum_series

        got = _sum_series(lambda j: -0.5 * j, eps=1e-16, what="probe")
        assert got == pytest.approx(math.exp(-0.5) / (1 - math.exp(-0.5)), rel=1e-12)


class TestDomination:
    @pytest.mark.parametrize("lam", GRID)
    def test_both_sides_across_grid(self, lam):
        p = BorelParams(lam)
        for t in T_GRID:
            low = exact_tail(p, t, "lower")
            assert low.value <= lower_tail_bound(t)
            up = exact_tail(p, t, "upper")
            assert up.value <= optimize_delta(lam, t).bound + up.error_bar
