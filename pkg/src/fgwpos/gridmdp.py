"""Tabular oracle machinery: a deterministic grid decision process with
position-determined rewards, value iteration, and policy evaluation.

The grid process strips the traffic simulation away: transitions are the
clamped grid moves and the reward of a step is the expected per-interval
reward of the cell the gateway lands on. It is the reference against which
the learned agent is verified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .env import StepResult, reward_snr_balance, reward_throughput_balance
from .linksim import expected_relay_throughput
from .phy import MCS_TABLE, LinkBudget, RadioConfig, snr
from .venue import Action, Position, Venue, clamp_move


def grid_positions(venue: Venue) -> list[Position]:
    """All reachable grid cells in row-major (x-major) order."""
    nx, ny = venue.grid_shape()
    return [Position(ix * venue.step, iy * venue.step) for ix in range(nx) for iy in range(ny)]


def snr_reward_table(
    venue: Venue,
    backhaul: Position,
    fap: Position,
    radio_ingress: RadioConfig,
    radio_fap: RadioConfig,
    weight: float = 2.0,
) -> np.ndarray:
    """Expected SNR-balance reward per grid cell; flat array in grid order."""
    vals = []
    for p in grid_positions(venue):
        d_b = max(math.hypot(p.x - backhaul.x, p.y - backhaul.y), 1.0)
        d_f = max(math.hypot(p.x - fap.x, p.y - fap.y), 1.0)
        s_in = snr(LinkBudget(radio_ingress, d_b))
        s_out = snr(LinkBudget(radio_fap, d_f))
        vals.append(reward_snr_balance(s_in, s_out, weight))
    return np.array(vals)


def throughput_reward_table(
    venue: Venue,
    backhaul: Position,
    faps: tuple[Position, ...],
    radios: dict[str, RadioConfig],
    traffic,
    mac_efficiency: float = 0.75,
    weight: float = 2.0,
) -> np.ndarray:
    """Expected throughput-balance reward per grid cell from the fluid link model."""
    load = traffic.udp_rate_bps
    vals = []
    for p in grid_positions(venue):
        t_fgw, t_faps = expected_relay_throughput(
            p, backhaul, faps, radios, traffic, mac_efficiency, MCS_TABLE
        )
        if len(faps) == 2:
            a, b = t_faps[0] / load, t_faps[1] / load
        else:
            a, b = t_fgw / load, t_faps[0] / load
        vals.append(reward_throughput_balance(a, b, weight))
    return np.array(vals)


@dataclass
class GridMdp:
    """Deterministic finite MDP over the venue grid.

    Exposes both the tabular view (next_state / rewards matrices) and the
    environment API the agent trains against. Observations are the
    normalized cell coordinates.
    """

    venue: Venue
    cell_rewards: np.ndarray  # flat, grid_positions order
    horizon: int = 120
    start: Position | None = None
    random_start: bool = False

    def __post_init__(self):
        nx, ny = self.venue.grid_shape()
        self._nx, self._ny = nx, ny
        n_states = nx * ny
        if self.cell_rewards.shape != (n_states,):
            raise ValueError(f"cell_rewards must have {n_states} entries")
        self.positions = grid_positions(self.venue)
        self.next_state = np.zeros((n_states, len(Action)), dtype=np.int64)
        self.rewards = np.zeros((n_states, len(Action)))
        for s, p in enumerate(self.positions):
            for a in Action:
                nxt = clamp_move(p, a, self.venue)
                ns = self.state_index(nxt)
                self.next_state[s, a] = ns
                self.rewards[s, a] = self.cell_rewards[ns]
        self._state = 0
        self._steps = 0
        self._done = True
        self._rng = np.random.default_rng(0)

    @property
    def n_states(self) -> int:
        return self._nx * self._ny

    def state_index(self, p: Position) -> int:
        ix = int(round(p.x / self.venue.step))
        iy = int(round(p.y / self.venue.step))
        return ix * self._ny + iy

    def observation_size(self) -> int:
        return 2

    def action_count(self) -> int:
        return len(Action)

    def observe(self, state: int) -> np.ndarray:
        p = self.positions[state]
        return np.array([p.x / self.venue.width, p.y / self.venue.height])

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self._rng = np.random.default_rng(np.random.SeedSequence([int(seed)]))
        if self.random_start:
            self._state = int(self._rng.integers(self.n_states))
        elif self.start is not None:
            self._state = self.state_index(self.start)
        else:
            self._state = 0
        self._steps = 0
        self._done = False
        return self.observe(self._state)

    def step(self, action) -> StepResult:
        if self._done:
            raise RuntimeError("step() called on a finished episode; call reset() first")
        a = int(action)
        reward = float(self.rewards[self._state, a])
        self._state = int(self.next_state[self._state, a])
        self._steps += 1
        self._done = self._steps >= self.horizon
        return StepResult(
            observation=self.observe(self._state),
            reward=reward,
            done=self._done,
            info=None,
        )

    def all_observations(self) -> np.ndarray:
        return np.stack([self.observe(s) for s in range(self.n_states)])


def value_iteration(
    next_state: np.ndarray,
    rewards: np.ndarray,
    gamma: float,
    tol: float = 1e-8,
    max_iters: int = 200000,
) -> tuple[np.ndarray, np.ndarray]:
    """Bellman backups to sup-norm tolerance; returns (values, greedy policy)."""
    values = np.zeros(next_state.shape[0])
    for _ in range(max_iters):
        q = rewards + gamma * values[next_state]
        new = q.max(axis=1)
        delta = float(np.max(np.abs(new - values)))
        values = new
        if delta < tol:
            break
    else:
        raise RuntimeError("value iteration did not converge")
    q = rewards + gamma * values[next_state]
    policy = np.argmax(q, axis=1)
    return values, policy


def policy_evaluation(
    next_state: np.ndarray,
    rewards: np.ndarray,
    policy: np.ndarray,
    gamma: float,
    tol: float = 1e-8,
    max_iters: int = 200000,
) -> np.ndarray:
    """Fixed-policy discounted value by iterative backups."""
    states = np.arange(next_state.shape[0])
    r_pi = rewards[states, policy]
    nxt = next_state[states, policy]
    values = np.zeros(next_state.shape[0])
    for _ in range(max_iters):
        new = r_pi + gamma * values[nxt]
        delta = float(np.max(np.abs(new - values)))
        values = new
        if delta < tol:
            return values
    raise RuntimeError("policy evaluation did not converge")


def greedy_policy_of(net, mdp: GridMdp) -> np.ndarray:
    """Greedy action of a Q-network at every grid state."""
    q = net.forward(mdp.all_observations())
    return np.argmax(q, axis=1)
