"""Link-budget arithmetic: free-space received power, noise floor, SNR,
the 802.11n single-stream MCS set, and a logistic SNR-to-PER surrogate."""

from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299792458.0  # m/s

# Logistic PER steepness, per dB of SNR margin against the MCS anchor.
PER_STEEPNESS = 2.0


@dataclass(frozen=True)
class RadioConfig:
    tx_power_dbm: float = 20.0
    tx_gain_dbi: float = 0.0
    rx_gain_dbi: float = 0.0
    frequency_hz: float = 5.18e9
    bandwidth_hz: float = 20e6
    noise_figure_db: float = 7.0

    def __post_init__(self):
        if self.frequency_hz <= 0:
            raise ValueError("frequency_hz must be positive")
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive")


@dataclass(frozen=True)
class Mcs:
    index: int
    phy_rate_bps: float
    min_snr_db: float


# 802.11n, 20 MHz, long guard interval, one spatial stream.
# min_snr anchors are receiver-sensitivity-style thresholds for the PER
# surrogate, laddered densely so capacity tracks distance without wide flats.
MCS_TABLE: tuple[Mcs, ...] = (
    Mcs(0, 6.5e6, 2.0),
    Mcs(1, 13.0e6, 4.0),
    Mcs(2, 19.5e6, 6.0),
    Mcs(3, 26.0e6, 8.5),
    Mcs(4, 39.0e6, 12.0),
    Mcs(5, 52.0e6, 16.0),
    Mcs(6, 58.5e6, 20.0),
    Mcs(7, 65.0e6, 24.0),
)


@dataclass(frozen=True)
class LinkBudget:
    config: RadioConfig
    distance_m: float


def friis_rx_power(budget: LinkBudget) -> float:
    """Received power in dBm: P_tx + G_tx + G_rx + 20 log10(c / (4 pi D f))."""
    if budget.distance_m <= 0:
        raise ValueError("distance_m must be positive")
    c = budget.config
    free_space = 20.0 * math.log10(
        SPEED_OF_LIGHT / (4.0 * math.pi * budget.distance_m * c.frequency_hz)
    )
    return c.tx_power_dbm + c.tx_gain_dbi + c.rx_gain_dbi + free_space


def noise_floor(config: RadioConfig) -> float:
    """Thermal noise floor in dBm: -174 dBm/Hz + 10 log10(bandwidth) + noise figure."""
    return -174.0 + 10.0 * math.log10(config.bandwidth_hz) + config.noise_figure_db


def snr(budget: LinkBudget) -> float:
    """Received SNR in dB."""
    return friis_rx_power(budget) - noise_floor(budget.config)


def per(mcs: Mcs, snr_db: float, packet_bits: int = 11200) -> float:
    """Packet error rate in [0, 1], logistic in the SNR margin over the MCS anchor.

    The surrogate is calibrated at the default packet size; `packet_bits` is kept
    in the contract (must be positive) but does not change the curve.
    """
    if packet_bits <= 0:
        raise ValueError("packet_bits must be positive")
    margin = snr_db - mcs.min_snr_db
    # guard exp overflow far from the anchor
    if margin < -300.0:
        return 1.0
    if margin > 300.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(PER_STEEPNESS * margin))
