import math

import pytest
from hypothesis import given, strategies as st

from fgwpos.phy import (
    MCS_TABLE,
    LinkBudget,
    Mcs,
    RadioConfig,
    friis_rx_power,
    noise_floor,
    per,
    snr,
)


def oracle_rx_power(p_tx_dbm, d_m, f_hz):
    # independent one-line free-space budget, written before the implementation
    return p_tx_dbm + 20 * math.log10(299792458.0 / (4 * math.pi * d_m * f_hz))


def budget(p_tx=20.0, d=1000.0, f=5.18e9, nf=7.0):
    return LinkBudget(
        RadioConfig(tx_power_dbm=p_tx, frequency_hz=f, noise_figure_db=nf), d
    )


class TestFriis:
    def test_reference_1000m(self):
        assert friis_rx_power(budget(20.0, 1000.0)) == pytest.approx(-86.73, abs=0.05)

    def test_reference_550m_15dbm(self):
        assert friis_rx_power(budget(15.0, 550.0)) == pytest.approx(-86.54, abs=0.05)

    def test_doubling_distance(self):
        drop = friis_rx_power(budget(d=500.0)) - friis_rx_power(budget(d=1000.0))
        assert drop == pytest.approx(20 * math.log10(2), abs=1e-9)

    def test_gains_add(self):
        cfg = RadioConfig(tx_power_dbm=10, tx_gain_dbi=3, rx_gain_dbi=2)
        base = RadioConfig(tx_power_dbm=10)
        d = 200.0
        assert friis_rx_power(LinkBudget(cfg, d)) == pytest.approx(
            friis_rx_power(LinkBudget(base, d)) + 5.0
        )

    def test_nonpositive_distance_rejected(self):
        with pytest.raises(ValueError):
            friis_rx_power(budget(d=0.0))
        with pytest.raises(ValueError):
            friis_rx_power(budget(d=-5.0))

    @given(
        p=st.floats(min_value=-30, max_value=40),
        d=st.floats(min_value=1.0, max_value=10_000.0),
        f=st.floats(min_value=1e9, max_value=10e9),
    )
    def test_matches_oracle(self, p, d, f):
        got = friis_rx_power(LinkBudget(RadioConfig(tx_power_dbm=p, frequency_hz=f), d))
        assert got == pytest.approx(oracle_rx_power(p, d, f), abs=1e-9)

    @given(d=st.floats(min_value=1.0, max_value=9_999.0))
    def test_strictly_decreasing_in_distance(self, d):
        assert friis_rx_power(budget(d=d)) > friis_rx_power(budget(d=d * 1.01))


class TestNoiseFloor:
    def test_20mhz_nf7(self):
        assert noise_floor(RadioConfig(noise_figure_db=7.0)) == pytest.approx(-93.99, abs=0.01)

    def test_20mhz_nf0(self):
        assert noise_floor(RadioConfig(noise_figure_db=0.0)) == pytest.approx(-100.99, abs=0.01)

    def test_bandwidth_decade(self):
        lo = noise_floor(RadioConfig(bandwidth_hz=2e6))
        hi = noise_floor(RadioConfig(bandwidth_hz=20e6))
        assert hi - lo == pytest.approx(10.0, abs=1e-9)


class TestSnr:
    def test_reference(self):
        assert snr(budget(20.0, 1000.0, nf=7.0)) == pytest.approx(7.26, abs=0.1)

    def test_deterministic(self):
        assert snr(budget()) == snr(budget())

    def test_power_distance_balance(self):
        # 15 dBm at 550 m nearly equals 20 dBm at 950 m
        a = snr(budget(15.0, 550.0))
        b = snr(budget(20.0, 950.0))
        assert abs(a - b) <= 0.3

    def test_symmetric_link(self):
        # identical radios at both ends: direction does not matter
        cfg = RadioConfig(tx_power_dbm=17.0)
        assert snr(LinkBudget(cfg, 321.0)) == snr(LinkBudget(cfg, 321.0))


class TestMcsTable:
    def test_rates_match_ofdm_formula(self):
        # 52 data subcarriers, 4 us symbol (long GI), one stream
        bits_per_sub = [1, 2, 2, 4, 4, 6, 6, 6]
        coding = [1 / 2, 1 / 2, 3 / 4, 1 / 2, 3 / 4, 2 / 3, 3 / 4, 5 / 6]
        for mcs, nb, r in zip(MCS_TABLE, bits_per_sub, coding):
            expected = 52 * nb * r / 4e-6
            assert mcs.phy_rate_bps == pytest.approx(expected)

    def test_monotone(self):
        rates = [m.phy_rate_bps for m in MCS_TABLE]
        anchors = [m.min_snr_db for m in MCS_TABLE]
        assert rates == sorted(rates) and len(set(rates)) == 8
        assert anchors == sorted(anchors) and len(set(anchors)) == 8


class TestPer:
    def test_midpoint(self):
        m = MCS_TABLE[3]
        assert per(m, m.min_snr_db) == pytest.approx(0.5)

    def test_three_db_margin(self):
        m = MCS_TABLE[0]
        assert per(m, m.min_snr_db + 3.0) == pytest.approx(0.0025, abs=1e-4)

    def test_low_snr_limit(self):
        assert per(MCS_TABLE[0], -1000.0) == pytest.approx(1.0)

    def test_invalid_packet_bits(self):
        with pytest.raises(ValueError):
            per(MCS_TABLE[0], 10.0, packet_bits=0)

    @given(
        snr_db=st.floats(min_value=-50, max_value=60),
        delta=st.floats(min_value=0.01, max_value=20),
        idx=st.integers(min_value=0, max_value=7),
    )
    def test_monotone_in_snr(self, snr_db, delta, idx):
        m = MCS_TABLE[idx]
        assert per(m, snr_db + delta) <= per(m, snr_db)

    @given(
        snr_db=st.floats(min_value=-50, max_value=60),
        idx=st.integers(min_value=0, max_value=6),
    )
    def test_monotone_in_index(self, snr_db, idx):
        assert per(MCS_TABLE[idx + 1], snr_db) >= per(MCS_TABLE[idx], snr_db)

    @given(snr_db=st.floats(min_value=-1e6, max_value=1e6), idx=st.integers(0, 7))
    def test_bounded(self, snr_db, idx):
        p = per(MCS_TABLE[idx], snr_db)
        assert 0.0 <= p <= 1.0
