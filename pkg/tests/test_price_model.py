import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from shockflow.errors import InputError, InvalidGridValue, LengthMismatch, NonPositivePrice
from shockflow.fund_flow import DEFAULT_REGIMES, FlowOrigin, NormalizedFlowSeries
from shockflow.phases import Phase, PhaseSchedule, PhaseSpec
from shockflow.price_model import (
    Scenario, SweepAxis, simulate, simulate_ensemble, step_price, sweep,
)
from shockflow.scenario import resolve

SEEDS = range(1, 1001)


def flow(values, tags=None):
    return NormalizedFlowSeries(np.array(values, dtype=float), FlowOrigin.SYNTHETIC, tags)


def shock_only(n, lam=0.1):
    return PhaseSchedule((PhaseSpec(Phase.SHOCK, n, lam),))


@pytest.fixture(scope="module")
def quality():
    return resolve("synthetic-quality").scenario


class TestStep:
    def test_full_outflow_in_shock(self):
        assert step_price(100, -1, 0.1, 0.4, True) == 90

    def test_calm_day(self):
        assert step_price(100, 0.1, 0.7, 0.4, False) == pytest.approx(102.8, abs=1e-12)

    @pytest.mark.parametrize("in_shock", [True, False])
    def test_zero_flow_is_fixed_point(self, in_shock):
        assert step_price(42.0, 0.0, 0.9, -0.3, in_shock) == 42.0

    def test_factor_not_positive(self):
        with pytest.raises(NonPositivePrice):
            step_price(1.0, -1.0, 1.0, 0.4, True)

    def test_price_not_positive(self):
        with pytest.raises(NonPositivePrice):
            step_price(0.0, 0.1, 0.1, 0.4, False)

    @given(st.floats(-1, 1), st.floats(0, 1), st.floats(-5, 5), st.floats(-5, 5))
    def test_shock_ignores_phi(self, psi, lam, phi_a, phi_b):
        if 1 + lam * psi <= 0:
            return
        assert step_price(1.0, psi, lam, phi_a, True) == step_price(1.0, psi, lam, phi_b, True)

    @given(st.floats(-1, 1), st.floats(0, 0.99), st.floats(-1, 1))
    def test_positive_when_factor_positive(self, psi, lam, phi):
        assert step_price(0.5, psi, lam, phi, False) > 0


class TestSimulate:
    def test_zero_flow_constant(self, quality):
        n = quality.schedule.total_length
        out = simulate(0.5, flow(np.zeros(n)), quality.schedule, 0.4)
        assert len(out) == n + 1
        assert np.all(out.values == 0.5)

    @pytest.mark.parametrize("phi", [-3.0, 0.0, 0.4, 7.0])
    def test_shock_path_independent_of_phi(self, phi):
        out = simulate(100, flow([-1, -1]), shock_only(2), phi)
        np.testing.assert_allclose(out.values, [100, 90, 81], rtol=0, atol=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            simulate(1.0, flow([0.1, 0.2, 0.3]), shock_only(2), 0.4)

    def test_tag_mismatch(self):
        sched = PhaseSchedule((PhaseSpec(Phase.PRE_SHOCK, 1, 0.2), PhaseSpec(Phase.SHOCK, 1, 0.1)))
        with pytest.raises(LengthMismatch):
            simulate(1.0, flow([0, 0], (Phase.SHOCK, Phase.SHOCK)), sched, 0.4)

    def test_non_positive_reports_day(self):
        with pytest.raises(NonPositivePrice) as info:
            simulate(1.0, flow([0.1, 0.2, -1.0, 0.0]), shock_only(4, lam=1.0), 0.4)
        assert info.value.day == 2

    def test_bad_initial_price(self):
        with pytest.raises(InputError):
            simulate(0.0, flow([0.1]), shock_only(1), 0.4)

    def test_output_read_only(self, quality):
        out = quality.run(1)
        with pytest.raises(ValueError):
            out.values[0] = 1

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31), st.floats(-0.5, 0.8))
    def test_vectorized_matches_step_by_step(self, seed, phi):
        sc = resolve("synthetic-quality").scenario
        f = sc.flow_for(seed)
        out = simulate(0.5, f, sc.schedule, phi)
        p = 0.5
        for t, (kind, lam) in enumerate(zip(sc.schedule.day_phases(), sc.schedule.day_lambdas())):
            p = step_price(p, f.values[t], lam, phi, kind is Phase.SHOCK)
            assert out.values[t + 1] == pytest.approx(p, rel=1e-12)

    def test_matches_independent_oracle(self, quality):
        seeds = range(1, 51)
        np.testing.assert_allclose(simulate_ensemble(quality, seeds), oracle.ensemble(seeds),
                                   rtol=1e-12)

    def test_metadata(self, quality):
        out = quality.run(9)
        assert out.metadata["seed"] == 9 and out.metadata["phi"] == 0.4


class TestScenario:
    def test_needs_exactly_one_flow_source(self, quality):
        with pytest.raises(InputError):
            Scenario(0.5, 0.4, quality.schedule)
        with pytest.raises(InputError):
            Scenario(0.5, 0.4, quality.schedule, regimes=DEFAULT_REGIMES, flow=flow([0.0] * 160))


@pytest.fixture(scope="module")
def by_shock_length():
    return sweep(resolve("synthetic-quality").scenario, SweepAxis.SHOCK_LENGTH,
                 [20, 40, 60, 80], SEEDS)


class TestSweep:
    def test_recovery_follows_shock_length(self, by_shock_length):
        for pt, t in zip(by_shock_length, (20, 40, 60, 80)):
            assert pt.scenario.schedule.length_of(Phase.SHOCK) == t
            assert pt.scenario.schedule.length_of(Phase.RECOVERY) == t
            assert pt.paths.shape == (1000, 120 + 2 * t + 1)

    def test_troughs_deepen_with_shock_length(self, by_shock_length):
        troughs = [pt.trough for pt in by_shock_length]
        assert all(a > b for a, b in zip(troughs, troughs[1:]))

    def test_statistics_match_oracle(self, by_shock_length):
        # frozen from oracle.ensemble over seeds 1..1000
        for pt, t, ratio, trough in zip(by_shock_length, (20, 40, 60, 80),
                                        (1.3233869, 1.1626705, 1.0626414, 0.9231109),
                                        (0.3051049, 0.1997060, 0.1307748, 0.0843877)):
            assert pt.terminal_ratio == pytest.approx(ratio, rel=1e-6)
            assert pt.trough == pytest.approx(trough, rel=1e-6)

    def test_oracle_reproduces_frozen_values(self):
        ref = oracle.ensemble(SEEDS, template=oracle.with_shock(40))
        assert np.median(ref[:, -1] / ref[:, 60]) == pytest.approx(1.1626705, rel=1e-6)

    def test_terminal_near_pre_shock_price(self, by_shock_length):
        # median terminal price within 10% of the median pre-shock price at T_S = 20
        med = by_shock_length[0].median_path
        assert med[-1] / med[60] == pytest.approx(1.0, abs=0.10)

    def test_higher_phi_ends_higher(self):
        pts = sweep(resolve("synthetic-quality").scenario, "phi", [0.3, 0.4, 0.5, 0.6], SEEDS)
        terminal = [pt.median_terminal for pt in pts]
        assert all(a < b for a, b in zip(terminal, terminal[1:]))

    def test_negative_phi_keeps_sliding(self):
        pts = sweep(resolve("synthetic-stressed").scenario, "phi",
                    [-0.05, -0.15, -0.25, -0.35], SEEDS)
        terminal = [pt.median_terminal for pt in pts]
        assert all(a > b for a, b in zip(terminal, terminal[1:]))
        for pt in pts:
            med = pt.median_path
            assert med[-1] <= med[pt.shock_start + 20] + 1e-12  # no recovery above the shock-end level
            assert pt.mean_daily_return(Phase.RECOVERY) < 0

    def test_jobs_do_not_change_results(self, quality):
        a = sweep(quality, "phi", [0.2, 0.4, 0.6], range(1, 21), jobs=1)
        b = sweep(quality, "phi", [0.2, 0.4, 0.6], range(1, 21), jobs=3)
        for x, y in zip(a, b):
            assert x.grid_value == y.grid_value
            assert x.paths.tobytes() == y.paths.tobytes()

    @pytest.mark.parametrize("grid", [[], [-20], [2.5], [float("nan")]])
    def test_invalid_grid(self, quality, grid):
        with pytest.raises(InvalidGridValue):
            sweep(quality, "shock-length", grid, [1])

    def test_no_seeds(self, quality):
        with pytest.raises(InvalidGridValue):
            sweep(quality, "phi", [0.4], [])

    def test_unknown_axis(self):
        with pytest.raises(InputError):
            SweepAxis.parse("lambda")


class TestInvariants:
    def test_prices_through_shock_ignore_phi(self):
        sched = PhaseSchedule((PhaseSpec(Phase.SHOCK, 10, 0.4), PhaseSpec(Phase.RECOVERY, 10, 0.7)))
        f = flow(np.random.default_rng(1).uniform(-1, 1, 20))
        a = simulate(1.0, f, sched, 0.9).values
        b = simulate(1.0, f, sched, -0.4).values
        np.testing.assert_array_equal(a[:11], b[:11])
        assert not np.array_equal(a[11:], b[11:])

    def test_shock_moves_ignore_phi_mid_schedule(self, quality):
        # calm days before the shock do depend on phi, the shock's own relative moves do not
        f = quality.flow_for(3)
        s = quality.schedule.start_of(Phase.SHOCK)
        e = s + quality.schedule.length_of(Phase.SHOCK)
        a = simulate(0.5, f, quality.schedule, 0.1).values
        b = simulate(0.5, f, quality.schedule, 0.6).values
        np.testing.assert_allclose(a[s:e + 1] / a[s], b[s:e + 1] / b[s], rtol=1e-13)

    @pytest.mark.parametrize("phi, sign", [(-0.2, -1), (-0.05, -1), (0.05, 1), (0.4, 1)])
    def test_recovery_drift_sign(self, quality, phi, sign):
        pt = sweep(quality, "phi", [phi], SEEDS)[0]
        assert np.sign(pt.mean_daily_return(Phase.RECOVERY)) == sign

    def test_same_inputs_same_output(self, quality):
        f = quality.flow_for(5)
        a = simulate(0.5, f, quality.schedule, 0.4)
        b = simulate(0.5, f, quality.schedule, 0.4)
        assert a.values.tobytes() == b.values.tobytes()

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**31), st.floats(0.01, 2.0), st.floats(0, 1))
    def test_larger_flow_never_lowers_price(self, seed, phi, bump):
        sched = PhaseSchedule((PhaseSpec(Phase.PRE_SHOCK, 15, 0.2), PhaseSpec(Phase.SHOCK, 10, 0.1),
                               PhaseSpec(Phase.RECOVERY, 15, 0.7)))
        rng = np.random.default_rng(seed)
        low = rng.uniform(-1, 1, 40)
        high = low.copy()
        calm = np.array([k is not Phase.SHOCK for k in sched.day_phases()])
        high[calm] = np.minimum(1.0, low[calm] + bump * rng.uniform(0, 1, calm.sum()))
        try:
            a = simulate(1.0, flow(low), sched, phi).values
            b = simulate(1.0, flow(high), sched, phi).values
        except NonPositivePrice:
            return
        assert np.all(b >= a * (1 - 1e-12))
