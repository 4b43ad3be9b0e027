import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gebsafe.errors import ZeroSlope
from gebsafe.profiles import default_profiles
from gebsafe.steady_state import (
    AffineIndoorMap,
    ComfortBand,
    affine_indoor_map,
    equilibrium,
    feasible_region,
    indoor_sensitivities,
)
from gebsafe.thermal import BuildingParams, Disturbance, build_state_space, discretize

from oracles import grid_scan_region, iterate_to_equilibrium

SS = build_state_space(BuildingParams.paper_defaults())
BAND = ComfortBand(18.0, 22.0)

# central difference of equilibrium t_in in q, see scripts/derive_fixtures.py
SLOPE_FD = -0.005063496089823978
# intercept at the hottest default-profile row and its 1 W grid-scan region
PEAK_ROW = 60
PEAK_INTERCEPT = 41.79382418979841
PEAK_REGION_GRID = (3910.0, 4699.0)
# passive (q = 0) equilibrium at the noon row; LU solve, confirmed by iterated stepping to 1.7e-9
NOON_PASSIVE = [43.44744342927703, 41.491471714638514, 70.2301614403359, 63.44744342927702]

disturbances = st.builds(
    Disturbance,
    t_amb=st.floats(10, 45),
    q_ihl=st.floats(0, 1500),
    q_sol=st.floats(0, 1500),
    t_sol_w=st.floats(10, 70),
    t_sol_f=st.floats(10, 80),
    t_sol_a=st.floats(0, 30),
)


class TestComfortBand:
    def test_inverted_band_rejected(self):
        with pytest.raises(ValueError):
            ComfortBand(22.0, 18.0)

    def test_contains_with_tolerance(self):
        assert BAND.contains(22.04, tol=0.05)
        assert not BAND.contains(22.06, tol=0.05)


class TestEquilibrium:
    def test_matches_iterated_zoh(self):
        disc = discretize(SS, 900.0)
        d = default_profiles().disturbance(48)
        want = iterate_to_equilibrium(disc.a_d, disc.b_d, disc.g_d, [20, 20, 20, 20], 2000.0, d.as_array())
        np.testing.assert_allclose(equilibrium(SS, 2000.0, d).as_array(), want, atol=1e-6)

    def test_noon_passive_fixture(self):
        d = default_profiles().disturbance(48)
        np.testing.assert_allclose(equilibrium(SS, 0.0, d).as_array(), NOON_PASSIVE, atol=1e-9)

    def test_zero_inputs_give_zero_state(self):
        np.testing.assert_allclose(equilibrium(SS, 0.0, Disturbance.zero()).as_array(), 0.0, atol=1e-12)

    @settings(max_examples=50)
    @given(d=disturbances, q1=st.floats(0, 6000), q2=st.floats(0, 6000))
    def test_linear_in_cooling(self, d, q1, q2):
        e1 = equilibrium(SS, q1, d).as_array()
        e2 = equilibrium(SS, q2, d).as_array()
        per_watt = equilibrium(SS, 1.0, Disturbance.zero()).as_array()
        np.testing.assert_allclose(e2 - e1, (q2 - q1) * per_watt, atol=1e-6)
        assert per_watt[0] == pytest.approx(SLOPE_FD, rel=1e-8)


class TestAffineMap:
    def test_slope_matches_finite_difference(self):
        m = affine_indoor_map(SS, Disturbance.zero())
        assert m.k == pytest.approx(SLOPE_FD, rel=1e-8)
        assert m.k < 0

    def test_sensitivities_agree(self):
        d = default_profiles().disturbance(PEAK_ROW)
        k, row = indoor_sensitivities(SS)
        m = affine_indoor_map(SS, d)
        assert k == m.k
        assert float(row @ d.as_array()) == pytest.approx(m.b, abs=1e-12)
        assert m.b == pytest.approx(PEAK_INTERCEPT, abs=1e-9)

    @settings(max_examples=50)
    @given(d=disturbances, q=st.floats(0, 6000))
    def test_reproduces_equilibrium(self, d, q):
        assert affine_indoor_map(SS, d)(q) == pytest.approx(equilibrium(SS, q, d).t_in, abs=1e-6)


class TestFeasibleRegion:
    def test_peak_row_matches_grid_scan(self):
        m = AffineIndoorMap(SLOPE_FD, PEAK_INTERCEPT)
        r = feasible_region(m, BAND, 6000.0)
        assert not r.empty
        # the grid holds whole watts, so the exact edges round inward onto it
        assert np.ceil(r.lo) == PEAK_REGION_GRID[0]
        assert np.floor(r.hi) == PEAK_REGION_GRID[1]

    def test_zero_slope_rejected(self):
        with pytest.raises(ZeroSlope):
            feasible_region(AffineIndoorMap(0.0, 20.0), BAND, 6000.0)

    @pytest.mark.parametrize("q_max", [0.0, -5.0])
    def test_nonpositive_capacity_rejected(self, q_max):
        with pytest.raises(ValueError):
            feasible_region(AffineIndoorMap(SLOPE_FD, 30.0), BAND, q_max)

    def test_too_hot_collapses_to_full_capacity(self):
        r = feasible_region(AffineIndoorMap(SLOPE_FD, 60.0), BAND, 6000.0)
        assert r.empty and r.lo == r.hi == 6000.0

    def test_too_cold_collapses_to_off(self):
        r = feasible_region(AffineIndoorMap(SLOPE_FD, 10.0), BAND, 6000.0)
        assert r.empty and r.lo == r.hi == 0.0

    def test_comfortable_without_cooling_includes_zero(self):
        r = feasible_region(AffineIndoorMap(SLOPE_FD, 20.0), BAND, 6000.0)
        assert r.lo == 0.0 and r.hi == pytest.approx(2.0 / -SLOPE_FD)

    def test_positive_slope_inverts_too(self):
        r = feasible_region(AffineIndoorMap(0.001, 15.0), BAND, 6000.0)
        assert r.lo == pytest.approx(3000.0) and r.hi == pytest.approx(6000.0)

    @settings(max_examples=50, deadline=None)
    @given(b=st.floats(5, 60), q_max=st.floats(100, 8000))
    def test_sound_and_tight_against_grid_scan(self, b, q_max):
        m = AffineIndoorMap(SLOPE_FD, b)
        r = feasible_region(m, BAND, q_max)
        qs, inside = grid_scan_region(m.k, m.b, BAND.t_low, BAND.t_high, q_max, step=1.0)
        classified = (qs >= r.lo) & (qs <= r.hi)
        if r.empty:
            assert not inside.any()
            return
        t = m(qs)
        near_edge = (np.abs(t - BAND.t_low) < 1e-6) | (np.abs(t - BAND.t_high) < 1e-6)
        assert np.all((classified == inside) | near_edge)
        assert 0.0 <= r.lo <= r.hi <= q_max
        assert BAND.contains(m(r.lo), 1e-9) and BAND.contains(m(r.hi), 1e-9)
