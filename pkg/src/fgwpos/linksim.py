"""Per-decision-interval traffic simulation over the directed relay links.

Each decision interval is split into rate-adaptation update windows. Offered
UDP load is capped by the chosen PHY rate times a MAC efficiency factor,
packets succeed by Bernoulli sampling against the SNR-driven PER, and the
gateway forwards store-and-forward with one window of latency: what arrived
in the previous window is what can be offered toward a FAP in the next one.
With two FAPs the ingress link carries one flow per FAP and capacity is
split round-robin between them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .phy import MCS_TABLE, LinkBudget, Mcs, RadioConfig, per, snr
from .ra import IdealSelector, MinstrelConfig, MinstrelSelector
from .venue import Position, Venue, WaypointSchedule, distance, position_at

# nodes sharing a grid cell are treated as 1 m apart for budget evaluation
MIN_LINK_DISTANCE_M = 1.0

INGRESS_LINK = "backhaul_fgw"


def fap_link_name(index: int) -> str:
    return f"fgw_fap{index + 1}"


@dataclass(frozen=True)
class TrafficConfig:
    udp_rate_bps: float = 70e6
    packet_size_bytes: int = 1400

    def __post_init__(self):
        if self.udp_rate_bps <= 0:
            raise ValueError("udp_rate_bps must be positive")
        if self.packet_size_bytes <= 0:
            raise ValueError("packet_size_bytes must be positive")

    @property
    def packet_bits(self) -> int:
        return self.packet_size_bytes * 8


@dataclass
class LinkMetrics:
    snr_db: float
    throughput_bps: float
    chosen_rate: int
    delivered_packets: int
    offered_packets: int


@dataclass
class NetworkSnapshot:
    t: float  # interval end time
    fgw: Position
    backhaul: Position
    faps: tuple[Position, ...]
    links: dict[str, LinkMetrics]


def link_snr(radio: RadioConfig, a: Position, b: Position) -> float:
    return snr(LinkBudget(radio, max(distance(a, b), MIN_LINK_DISTANCE_M)))


class RelayLinkSim:
    """Owns per-link RA state, relay backlog and the traffic RNG for one topology."""

    def __init__(
        self,
        venue: Venue,
        backhaul: Position,
        fap_schedules: tuple[WaypointSchedule, ...],
        radios: dict[str, RadioConfig],
        traffic: TrafficConfig,
        ra_algorithm: str = "minstrel",
        minstrel: MinstrelConfig | None = None,
        mac_efficiency: float = 0.75,
        seed: int = 0,
        table: tuple[Mcs, ...] = MCS_TABLE,
    ):
        if not fap_schedules:
            raise ValueError("topology needs at least one FAP")
        if len(fap_schedules) > 2:
            raise ValueError("topology supports at most two FAPs")
        if not 0.0 < mac_efficiency <= 1.0:
            raise ValueError("mac_efficiency must be in (0, 1]")
        if ra_algorithm not in ("minstrel", "ideal"):
            raise ValueError(f"unknown RA algorithm: {ra_algorithm!r}")
        self.venue = venue
        self.backhaul = backhaul
        self.fap_schedules = fap_schedules
        self.traffic = traffic
        self.mac_efficiency = mac_efficiency
        self.table = table
        self.minstrel_config = minstrel or MinstrelConfig()
        self.ra_algorithm = ra_algorithm
        self.link_names = [INGRESS_LINK] + [fap_link_name(i) for i in range(len(fap_schedules))]
        for name in self.link_names:
            if name not in radios:
                raise ValueError(f"missing radio config for link {name!r}")
        self.radios = {name: radios[name] for name in self.link_names}
        interval = venue.decision_interval
        update = self.minstrel_config.update_interval_s
        windows = interval / update
        if abs(windows - round(windows)) > 1e-9:
            raise ValueError("update interval must divide the decision interval evenly")
        self.windows_per_interval = int(round(windows))
        self.window_s = update
        self.reset(seed)

    @classmethod
    def from_scenario(cls, scenario, seed: int) -> "RelayLinkSim":
        return cls(
            venue=scenario.venue,
            backhaul=scenario.backhaul,
            fap_schedules=scenario.fap_schedules,
            radios=scenario.radios,
            traffic=scenario.traffic,
            ra_algorithm=scenario.ra_algorithm,
            minstrel=scenario.minstrel,
            mac_efficiency=scenario.mac_efficiency,
            seed=seed,
        )

    def reset(self, seed: int) -> None:
        root = np.random.SeedSequence([int(seed)])
        streams = root.spawn(1 + len(self.link_names))
        self._traffic_rng = np.random.default_rng(streams[0])
        self._selectors = {}
        for name, stream in zip(self.link_names, streams[1:]):
            if self.ra_algorithm == "minstrel":
                self._selectors[name] = MinstrelSelector(
                    self.table, np.random.default_rng(stream), self.minstrel_config
                )
            else:
                self._selectors[name] = IdealSelector(self.table)
        n_flows = len(self.fap_schedules)
        self._fgw_rx_prev = [0] * n_flows   # store-and-forward backlog per flow
        self._offer_acc = [0.0] * n_flows   # fractional packet accumulator per flow
        self._rr_first = 0                  # which flow the odd capped packet goes to

    def selector(self, name: str):
        return self._selectors[name]

    def _cap_packets(self, rate: int, share: float = 1.0) -> int:
        bits = self.table[rate].phy_rate_bps * self.mac_efficiency * self.window_s * share
        return int(math.floor(bits / self.traffic.packet_bits))

    def simulate_interval(self, fgw: Position, t_start: float) -> NetworkSnapshot:
        """Simulate one decision interval with the gateway fixed at `fgw`."""
        n_flows = len(self.fap_schedules)
        per_window_offer = self.traffic.udp_rate_bps * self.window_s / self.traffic.packet_bits
        offered = {name: 0 for name in self.link_names}
        delivered = {name: 0 for name in self.link_names}
        last_snr = {name: 0.0 for name in self.link_names}
        rng = self._traffic_rng

        for w in range(self.windows_per_interval):
            t_end = t_start + (w + 1) * self.window_s
            fap_pos = [position_at(s, t_end) for s in self.fap_schedules]

            # ingress link: backhaul -> FGW, one flow per FAP
            snr_in = link_snr(self.radios[INGRESS_LINK], self.backhaul, fgw)
            sel_in = self._selectors[INGRESS_LINK]
            demands = []
            for f in range(n_flows):
                self._offer_acc[f] += per_window_offer
                n_pkts = int(math.floor(self._offer_acc[f]))
                self._offer_acc[f] -= n_pkts
                demands.append(n_pkts)
            offered[INGRESS_LINK] += sum(demands)
            remaining = list(demands)
            succ = [0] * n_flows
            for rate, share in sel_in.window_plan(snr_in):
                cap = self._cap_packets(rate, share)
                attempts = self._split_capacity(remaining, cap)
                p_ok = 1.0 - per(self.table[rate], snr_in)
                slice_succ = 0
                for f in range(n_flows):
                    got = int(rng.binomial(attempts[f], p_ok)) if attempts[f] > 0 else 0
                    succ[f] += got
                    slice_succ += got
                    remaining[f] -= attempts[f]
                sel_in.record(rate, sum(attempts), slice_succ)
            delivered[INGRESS_LINK] += sum(succ)
            last_snr[INGRESS_LINK] = snr_in

            # FAP links forward what arrived in the previous window
            for f in range(n_flows):
                name = fap_link_name(f)
                snr_out = link_snr(self.radios[name], fgw, fap_pos[f])
                sel = self._selectors[name]
                backlog = self._fgw_rx_prev[f]
                offered[name] += backlog
                left = backlog
                for rate, share in sel.window_plan(snr_out):
                    attempted = min(left, self._cap_packets(rate, share))
                    p_fap = 1.0 - per(self.table[rate], snr_out)
                    got = int(rng.binomial(attempted, p_fap)) if attempted > 0 else 0
                    sel.record(rate, attempted, got)
                    delivered[name] += got
                    left -= attempted
                last_snr[name] = snr_out
                self._fgw_rx_prev[f] = succ[f]

            for sel in self._selectors.values():
                sel.end_window()

        interval = self.venue.decision_interval
        links = {
            name: LinkMetrics(
                snr_db=last_snr[name],
                throughput_bps=delivered[name] * self.traffic.packet_bits / interval,
                chosen_rate=self._selectors[name].current_rate,
                delivered_packets=delivered[name],
                offered_packets=offered[name],
            )
            for name in self.link_names
        }
        return NetworkSnapshot(
            t=t_start + interval,
            fgw=fgw,
            backhaul=self.backhaul,
            faps=tuple(position_at(s, t_start + interval) for s in self.fap_schedules),
            links=links,
        )

    def _split_capacity(self, demands: list[int], cap: int) -> list[int]:
        """Round-robin fair split of `cap` transmit slots between the flows."""
        if len(demands) == 1:
            return [min(demands[0], cap)]
        total = sum(demands)
        if total <= cap:
            return list(demands)
        half = cap // 2
        extra = cap - 2 * half
        first = self._rr_first
        shares = [half, half]
        shares[first] += extra
        self._rr_first = 1 - self._rr_first
        # water-fill: hand unused share of one flow to the other
        a0 = min(demands[0], shares[0])
        a1 = min(demands[1], cap - a0)
        a0 = min(demands[0], cap - a1)
        return [a0, a1]


def sweep_diagonal(sim: RelayLinkSim) -> list[tuple[Position, NetworkSnapshot]]:
    """Move the FGW along the venue diagonal one grid step per interval,
    from one step inside the origin corner to one step short of the far corner,
    recording the per-interval metrics of the continuous run."""
    venue = sim.venue
    steps = int(round(min(venue.width, venue.height) / venue.step))
    out = []
    t = 0.0
    for k in range(1, steps):
        p = Position(k * venue.step, k * venue.step)
        out.append((p, sim.simulate_interval(p, t)))
        t += venue.decision_interval
    return out


def expected_link_throughput(
    offered_bps: float,
    distance_m: float,
    radio: RadioConfig,
    table: tuple[Mcs, ...] = MCS_TABLE,
    mac_efficiency: float = 0.75,
) -> float:
    """Deterministic fluid counterpart of one link: expected goodput under a
    rate chosen to maximize it. Used by grid oracles; independent of the
    sampled per-packet path."""
    s = snr(LinkBudget(radio, max(distance_m, MIN_LINK_DISTANCE_M)))
    best = 0.0
    for m in table:
        good = min(offered_bps, m.phy_rate_bps * mac_efficiency) * (1.0 - per(m, s))
        if good > best:
            best = good
    return best


def expected_relay_throughput(
    fgw: Position,
    backhaul: Position,
    faps: tuple[Position, ...],
    radios: dict[str, RadioConfig],
    traffic: TrafficConfig,
    mac_efficiency: float = 0.75,
    table: tuple[Mcs, ...] = MCS_TABLE,
) -> tuple[float, tuple[float, ...]]:
    """Expected (gateway ingress, per-FAP) throughputs for a static geometry."""
    ingress_offer = traffic.udp_rate_bps * len(faps)
    t_fgw = expected_link_throughput(
        ingress_offer, distance(backhaul, fgw), radios[INGRESS_LINK], table, mac_efficiency
    )
    share = t_fgw / len(faps)
    t_faps = tuple(
        expected_link_throughput(
            share, distance(fgw, fap), radios[fap_link_name(i)], table, mac_efficiency
        )
        for i, fap in enumerate(faps)
    )
    return t_fgw, t_faps
