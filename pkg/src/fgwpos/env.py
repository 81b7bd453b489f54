"""Episodic decision environment over the relay simulation.

The gateway takes one grid action per decision interval; the environment
simulates the interval and returns a normalized observation, a balance
reward, and the raw network snapshot.

Observation layout (all components in [0, 1]):
  one FAP:  [x/W, y/H, d_backhaul/diag, d_fap/diag, t_ingress/load, t_fap/load]
  two FAPs: [x/W, y/H, d_backhaul/diag, d_fap1/diag, d_fap2/diag]
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .linksim import INGRESS_LINK, NetworkSnapshot, RelayLinkSim, fap_link_name
from .venue import Action, clamp_move, distance

if TYPE_CHECKING:  # pragma: no cover
    from .config import Scenario

REWARD_MODES = ("snr-balance", "throughput-balance")


@dataclass(frozen=True)
class RewardSpec:
    mode: str = "snr-balance"
    imbalance_weight: float = 2.0

    def __post_init__(self):
        if self.mode not in REWARD_MODES:
            raise ValueError(f"unknown reward mode: {self.mode!r}")
        if self.imbalance_weight <= 0:
            raise ValueError("imbalance_weight must be positive")


def reward_snr_balance(snr_a: float, snr_b: float, weight: float = 2.0) -> float:
    """Sum of the two link SNRs minus a weighted penalty on their imbalance."""
    return snr_a + snr_b - weight * abs(snr_a - snr_b)


def reward_throughput_balance(t_a: float, t_b: float, weight: float = 2.0) -> float:
    """Same balance form over normalized receiver throughputs."""
    return t_a + t_b - weight * abs(t_a - t_b)


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool
    info: NetworkSnapshot


class RelayEnv:
    """One agent-facing environment instance; owns its simulator and RNG streams."""

    def __init__(self, scenario: "Scenario"):
        self.scenario = scenario
        self.venue = scenario.venue
        if scenario.reward.mode == "snr-balance" and scenario.n_faps != 1:
            raise ValueError("snr-balance reward requires a single-FAP topology")
        self._sim = RelayLinkSim.from_scenario(scenario, scenario.seed)
        self._fgw = scenario.fgw_start
        self._t = 0.0
        self._steps = 0
        self._done = True  # requires reset() before step()

    def observation_size(self) -> int:
        return 5 if self.scenario.n_faps == 2 else 6

    def action_count(self) -> int:
        return len(Action)

    @property
    def fgw(self):
        return self._fgw

    @property
    def backhaul(self):
        return self.scenario.backhaul

    @property
    def time(self) -> float:
        return self._t

    def current_faps(self):
        """FAP positions at the current simulation time."""
        from .venue import position_at

        return tuple(position_at(s, self._t) for s in self.scenario.fap_schedules)

    def reset(self, seed: int | None = None) -> np.ndarray:
        """Start an episode: gateway at the scenario start, fresh RA state,
        clock at zero, then one warm-up interval to populate the observation."""
        self._sim.reset(self.scenario.seed if seed is None else seed)
        self._fgw = self.scenario.fgw_start
        self._t = 0.0
        self._steps = 0
        self._done = False
        snap = self._sim.simulate_interval(self._fgw, self._t)
        self._t += self.venue.decision_interval
        return self._observe(snap)

    def step(self, action: Action | int) -> StepResult:
        if self._done:
            raise RuntimeError("step() called on a finished episode; call reset() first")
        self._fgw = clamp_move(self._fgw, Action(action), self.venue)
        snap = self._sim.simulate_interval(self._fgw, self._t)
        self._t += self.venue.decision_interval
        self._steps += 1
        self._done = self._steps >= self.scenario.horizon_steps
        return StepResult(
            observation=self._observe(snap),
            reward=self.compute_reward(snap),
            done=self._done,
            info=snap,
        )

    def compute_reward(self, snap: NetworkSnapshot) -> float:
        spec = self.scenario.reward
        load = self.scenario.traffic.udp_rate_bps
        if spec.mode == "snr-balance":
            return reward_snr_balance(
                snap.links[INGRESS_LINK].snr_db,
                snap.links[fap_link_name(0)].snr_db,
                spec.imbalance_weight,
            )
        if self.scenario.n_faps == 2:
            t_a = snap.links[fap_link_name(0)].throughput_bps / load
            t_b = snap.links[fap_link_name(1)].throughput_bps / load
        else:
            t_a = snap.links[INGRESS_LINK].throughput_bps / load
            t_b = snap.links[fap_link_name(0)].throughput_bps / load
        return reward_throughput_balance(t_a, t_b, spec.imbalance_weight)

    def _observe(self, snap: NetworkSnapshot) -> np.ndarray:
        v = self.venue
        diag = v.diagonal
        load = self.scenario.traffic.udp_rate_bps
        d_b = distance(self._fgw, self.scenario.backhaul) / diag
        if self.scenario.n_faps == 2:
            return np.array(
                [
                    self._fgw.x / v.width,
                    self._fgw.y / v.height,
                    d_b,
                    distance(self._fgw, snap.faps[0]) / diag,
                    distance(self._fgw, snap.faps[1]) / diag,
                ]
            )
        return np.array(
            [
                self._fgw.x / v.width,
                self._fgw.y / v.height,
                d_b,
                distance(self._fgw, snap.faps[0]) / diag,
                min(snap.links[INGRESS_LINK].throughput_bps / load, 1.0),
                min(snap.links[fap_link_name(0)].throughput_bps / load, 1.0),
            ]
        )
