import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gebsafe.devices import EssParams, EssState, PvProfile, energy_delta, hypothetical_energy, pv_available, step_ess
from gebsafe.errors import IndexOutOfRange

ESS = EssParams()
DT = 0.25


class TestEssParams:
    def test_defaults(self):
        assert (ESS.e_min, ESS.e_max, ESS.p_ch_max, ESS.p_dch_min) == (0.3, 2.0, 1.0, -1.0)
        assert (ESS.eta_ch, ESS.eta_dis) == (0.98, 0.85)

    @pytest.mark.parametrize(
        "kw",
        [{"e_min": 2.5}, {"e_min": -0.1}, {"p_ch_max": 0.0}, {"p_dch_min": 0.5}, {"eta_ch": 0.0}, {"eta_dis": 1.2}],
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            EssParams(**kw)


class TestStepEss:
    def test_charging_applies_efficiency(self):
        st_, p = step_ess(ESS, EssState(1.0), 0.8, DT)
        assert st_.energy == pytest.approx(1.0 + 0.98 * 0.8 * 0.25)
        assert p == 0.8

    def test_discharging_divides_by_efficiency(self):
        st_, p = step_ess(ESS, EssState(1.0), -0.85, DT)
        assert st_.energy == pytest.approx(1.0 - 0.25)
        assert p == -0.85

    def test_power_clipped(self):
        _, p = step_ess(ESS, EssState(1.0), 3.0, DT)
        assert p == 1.0
        _, p = step_ess(ESS, EssState(1.0), -3.0, DT)
        assert p == -1.0

    def test_capacity_clamp_back_computes_power(self):
        st_, p = step_ess(ESS, EssState(1.95), 1.0, DT)
        assert st_.energy == 2.0
        assert p == pytest.approx(0.05 / (0.98 * 0.25))
        st_, p = step_ess(ESS, EssState(0.35), -1.0, DT)
        assert st_.energy == 0.3
        assert p == pytest.approx(-0.05 * 0.85 / 0.25)

    def test_full_battery_cannot_charge(self):
        st_, p = step_ess(ESS, EssState(2.0), 1.0, DT)
        assert st_.energy == 2.0 and p == 0.0

    def test_nonpositive_dt_rejected(self):
        with pytest.raises(ValueError):
            step_ess(ESS, EssState(1.0), 0.1, 0.0)

    def test_hypothetical_ignores_limits(self):
        assert hypothetical_energy(ESS, EssState(1.9), 1.0, DT) == pytest.approx(1.9 + 0.245)
        assert energy_delta(ESS, -2.0, DT) == pytest.approx(-2.0 / 0.85 * 0.25)

    @settings(max_examples=200)
    @given(e0=st.floats(0.3, 2.0), p=st.floats(-5, 5))
    def test_stays_within_capacity(self, e0, p):
        st_, applied = step_ess(ESS, EssState(e0), p, DT)
        assert ESS.e_min <= st_.energy <= ESS.e_max
        assert ESS.p_dch_min <= applied <= ESS.p_ch_max
        # applied power reproduces the energy change through the efficiency model
        assert st_.energy == pytest.approx(e0 + energy_delta(ESS, applied, DT), abs=1e-12)

    @settings(max_examples=50)
    @given(seq=st.lists(st.floats(-1.5, 1.5), min_size=1, max_size=200))
    def test_long_sequences_stay_physical(self, seq):
        s = EssState(1.0)
        for p in seq:
            s, _ = step_ess(ESS, s, p, DT)
            assert ESS.e_min <= s.energy <= ESS.e_max


class TestPv:
    def test_lookup(self):
        prof = PvProfile(np.array([0.0, 0.1, 0.3]))
        assert pv_available(prof, 2) == 0.3

    @pytest.mark.parametrize("t", [-1, 3])
    def test_out_of_range(self, t):
        with pytest.raises(IndexOutOfRange):
            pv_available(PvProfile(np.zeros(3)), t)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            PvProfile(np.array([0.1, -0.1]))

    def test_read_only(self):
        prof = PvProfile(np.zeros(2))
        with pytest.raises(ValueError):
            prof.p_max[0] = 1.0
