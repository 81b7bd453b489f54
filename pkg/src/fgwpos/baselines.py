"""Geometric comparison policies: the equal-SNR point on the backhaul-FAP
segment, a constant-ratio FAP follower, and the centroid of the three nodes.
Each reduces to a target position plus a greedy single-axis walk."""

from __future__ import annotations

import math

from .phy import RadioConfig
from .venue import Action, Position, Venue, distance

SNR_BALANCE = "snr-balance"
FOLLOW_FAP = "follow-fap"
CENTROID = "centroid"
BASELINE_MODES = (SNR_BALANCE, FOLLOW_FAP, CENTROID)


def balance_fraction(radio_ingress: RadioConfig, radio_fap: RadioConfig) -> float:
    """Fraction along backhaul->FAP where both links see equal SNR.

    Equal SNR under free-space loss pins the distance ratio to
    d_backhaul / d_fap = 10^(delta_dB / 20), with delta the difference of
    transmit power plus gains between the two links (equal noise assumed).
    """
    delta_db = (
        radio_ingress.tx_power_dbm
        + radio_ingress.tx_gain_dbi
        + radio_ingress.rx_gain_dbi
        - radio_fap.tx_power_dbm
        - radio_fap.tx_gain_dbi
        - radio_fap.rx_gain_dbi
    )
    ratio = 10.0 ** (delta_db / 20.0)
    return ratio / (1.0 + ratio)


def snr_balance_point(
    backhaul: Position,
    fap: Position,
    radio_ingress: RadioConfig,
    radio_fap: RadioConfig,
    venue: Venue | None = None,
) -> Position:
    """Equal-SNR point on the backhaul-FAP segment, grid-snapped when a venue
    is given."""
    if backhaul == fap:
        raise ValueError("backhaul and FAP must be distinct")
    s = balance_fraction(radio_ingress, radio_fap)
    p = Position(backhaul.x + s * (fap.x - backhaul.x), backhaul.y + s * (fap.y - backhaul.y))
    return venue.snap(p) if venue is not None else p


def follow_fap_target(
    backhaul: Position,
    fap_now: Position,
    ratio: float,
    venue: Venue | None = None,
) -> Position:
    """Point dividing backhaul->current FAP at the fixed fraction `ratio`."""
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie in (0, 1)")
    p = Position(
        backhaul.x + ratio * (fap_now.x - backhaul.x),
        backhaul.y + ratio * (fap_now.y - backhaul.y),
    )
    return venue.snap(p) if venue is not None else p


def centroid_target(
    backhaul: Position,
    fap1: Position,
    fap2: Position,
    venue: Venue | None = None,
) -> Position:
    p = Position(
        (backhaul.x + fap1.x + fap2.x) / 3.0,
        (backhaul.y + fap1.y + fap2.y) / 3.0,
    )
    return venue.snap(p) if venue is not None else p


def baseline_policy_step(current: Position, target: Position, venue: Venue) -> Action:
    """One greedy step toward the target: larger-error axis first, ties go
    horizontal, SAME at the target."""
    dx = target.x - current.x
    dy = target.y - current.y
    half = venue.step / 2.0
    if abs(dx) < half and abs(dy) < half:
        return Action.SAME
    if abs(dx) >= abs(dy):
        return Action.RIGHT if dx > 0 else Action.LEFT
    return Action.UP if dy > 0 else Action.DOWN


class BaselinePolicy:
    """Target-following policy usable wherever a trained agent is."""

    def __init__(self, mode: str, scenario):
        if mode not in BASELINE_MODES:
            raise ValueError(f"unknown baseline policy: {mode!r}")
        if mode == CENTROID and scenario.n_faps != 2:
            raise ValueError("centroid baseline needs a two-FAP topology")
        if mode in (SNR_BALANCE, FOLLOW_FAP) and scenario.n_faps != 1:
            raise ValueError(f"{mode} baseline needs a single-FAP topology")
        self.mode = mode
        self.scenario = scenario
        if mode == FOLLOW_FAP:
            from .venue import position_at

            fap0 = position_at(scenario.fap_schedules[0], 0.0)
            d_b = distance(scenario.backhaul, scenario.fgw_start)
            d_f = distance(scenario.fgw_start, fap0)
            total = d_b + d_f
            self.ratio = d_b / total if total > 0 else 0.5
            self.ratio = min(max(self.ratio, 1e-6), 1.0 - 1e-6)

    def target(self, faps: tuple[Position, ...]) -> Position:
        sc = self.scenario
        if self.mode == SNR_BALANCE:
            from .linksim import INGRESS_LINK, fap_link_name

            return snr_balance_point(
                sc.backhaul,
                faps[0],
                sc.radios[INGRESS_LINK],
                sc.radios[fap_link_name(0)],
                sc.venue,
            )
        if self.mode == FOLLOW_FAP:
            return follow_fap_target(sc.backhaul, faps[0], self.ratio, sc.venue)
        return centroid_target(sc.backhaul, faps[0], faps[1], sc.venue)

    def action(self, fgw: Position, faps: tuple[Position, ...]) -> Action:
        return baseline_policy_step(fgw, self.target(faps), self.scenario.venue)
