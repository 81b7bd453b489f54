"""Deep Q-learning on a small fully-connected network, implemented directly on
numpy float64 arrays: forward pass, hand-written backpropagation, uniform
replay, a periodically synced target network and epsilon-greedy exploration.

Keeping the numerics in plain numpy makes training bit-reproducible per seed
and lets the gradient be validated against central finite differences.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .seeds import (
    STREAM_AGENT_EXPLORE,
    STREAM_AGENT_INIT,
    STREAM_AGENT_REPLAY,
    STREAM_TRAIN_EPISODE,
    derive_rng,
    derive_seed,
)

N_ACTIONS = 5


@dataclass(frozen=True)
class TrainSchedule:
    gamma: float = 0.95
    learning_rate: float = 1e-3
    batch_size: int = 64
    target_sync_period: int = 500
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_steps: int = 30000
    total_steps: int = 150000
    buffer_capacity: int = 50000
    learning_starts: int = 1000
    grad_clip_norm: float = 10.0
    hidden: tuple[int, ...] = (64, 64)

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must be in (0, 1)")
        if not 0.0 <= self.epsilon_end <= self.epsilon_start <= 1.0:
            raise ValueError("need 0 <= epsilon_end <= epsilon_start <= 1")
        for name in ("learning_rate", "batch_size", "target_sync_period",
                     "epsilon_decay_steps", "total_steps", "buffer_capacity",
                     "learning_starts", "grad_clip_norm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def epsilon_at(self, env_step: int) -> float:
        """Linear decay from epsilon_start to epsilon_end over epsilon_decay_steps."""
        if env_step >= self.epsilon_decay_steps:
            return self.epsilon_end
        frac = env_step / self.epsilon_decay_steps
        return self.epsilon_start - (self.epsilon_start - self.epsilon_end) * frac


class QNetwork:
    """Rectifier MLP with a linear output head, one Q-value per action."""

    def __init__(self, weights: list[np.ndarray], biases: list[np.ndarray]):
        self.weights = weights
        self.biases = biases

    @classmethod
    def initialize(
        cls,
        obs_dim: int,
        rng: np.random.Generator,
        hidden: tuple[int, ...] = (64, 64),
        n_actions: int = N_ACTIONS,
    ) -> "QNetwork":
        sizes = [obs_dim, *hidden, n_actions]
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(weights, biases)

    @property
    def obs_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def n_actions(self) -> int:
        return self.weights[-1].shape[0]

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.obs_dim, *(w.shape[0] for w in self.weights))

    def copy(self) -> "QNetwork":
        return QNetwork([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def forward(self, obs: np.ndarray) -> np.ndarray:
        """Q-values: shape (n_actions,) for one observation, (B, n_actions) for a batch."""
        x = np.asarray(obs, dtype=np.float64)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        if x.shape[1] != self.obs_dim:
            raise ValueError(f"observation size {x.shape[1]} != network input {self.obs_dim}")
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            x = np.maximum(x @ w.T + b, 0.0)
        x = x @ self.weights[-1].T + self.biases[-1]
        return x[0] if single else x

    def _forward_trace(self, x: np.ndarray):
        """Forward pass keeping pre-activations for backpropagation."""
        pre = []
        h = x
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            z = h @ w.T + b
            pre.append((h, z))
            h = np.maximum(z, 0.0)
        q = h @ self.weights[-1].T + self.biases[-1]
        return pre, h, q


def loss_and_gradients(
    net: QNetwork,
    obs: np.ndarray,
    actions: np.ndarray,
    targets: np.ndarray,
) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Mean squared error of Q(obs)[action] against fixed targets, with its
    gradient for every weight and bias."""
    x = np.asarray(obs, dtype=np.float64)
    batch = x.shape[0]
    pre, h_last, q = net._forward_trace(x)
    picked = q[np.arange(batch), actions]
    err = picked - targets
    loss = float(np.mean(err**2))

    d_q = np.zeros_like(q)
    d_q[np.arange(batch), actions] = 2.0 * err / batch
    grads_w: list[np.ndarray] = [None] * len(net.weights)
    grads_b: list[np.ndarray] = [None] * len(net.biases)
    grads_w[-1] = d_q.T @ h_last
    grads_b[-1] = d_q.sum(axis=0)
    upstream = d_q @ net.weights[-1]
    for layer in range(len(net.weights) - 2, -1, -1):
        h_in, z = pre[layer]
        d_z = upstream * (z > 0.0)
        grads_w[layer] = d_z.T @ h_in
        grads_b[layer] = d_z.sum(axis=0)
        if layer > 0:
            upstream = d_z @ net.weights[layer]
    return loss, grads_w, grads_b


def td_update(
    net: QNetwork,
    target_net: QNetwork,
    batch: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    schedule: TrainSchedule,
) -> float:
    """One clipped SGD step on the squared TD error; mutates `net`, returns the loss."""
    obs, actions, rewards, next_obs, dones = batch
    q_next = target_net.forward(next_obs).max(axis=1)
    targets = rewards + schedule.gamma * (1.0 - dones) * q_next
    loss, grads_w, grads_b = loss_and_gradients(net, obs, actions, targets)

    total_sq = sum(float(np.sum(g**2)) for g in grads_w) + sum(
        float(np.sum(g**2)) for g in grads_b
    )
    norm = np.sqrt(total_sq)
    scale = schedule.grad_clip_norm / norm if norm > schedule.grad_clip_norm else 1.0
    lr = schedule.learning_rate * scale
    for w, gw in zip(net.weights, grads_w):
        w -= lr * gw
    for b, gb in zip(net.biases, grads_b):
        b -= lr * gb
    return loss


def act(
    net: QNetwork,
    obs: np.ndarray,
    epsilon: float,
    rng: np.random.Generator | None = None,
) -> int:
    """Epsilon-greedy action; greedy ties resolve to the lowest index."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must be in [0, 1]")
    if epsilon > 0.0:
        if rng is None:
            raise ValueError("exploration requires an RNG")
        if rng.random() < epsilon:
            return int(rng.integers(net.n_actions))
    return int(np.argmax(net.forward(obs)))


@dataclass(frozen=True)
class Transition:
    obs: np.ndarray
    action: int
    reward: float
    next_obs: np.ndarray
    done: bool


class ReplayBuffer:
    """Fixed-capacity ring buffer with uniform seeded sampling."""

    def __init__(self, capacity: int, obs_dim: int):
        self.capacity = capacity
        self._obs = np.zeros((capacity, obs_dim))
        self._actions = np.zeros(capacity, dtype=np.int64)
        self._rewards = np.zeros(capacity)
        self._next_obs = np.zeros((capacity, obs_dim))
        self._dones = np.zeros(capacity)
        self._size = 0
        self._head = 0

    def __len__(self) -> int:
        return self._size

    def push(self, tr: Transition) -> None:
        i = self._head
        self._obs[i] = tr.obs
        self._actions[i] = tr.action
        self._rewards[i] = tr.reward
        self._next_obs[i] = tr.next_obs
        self._dones[i] = float(tr.done)
        self._head = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        idx = rng.integers(0, self._size, size=batch_size)
        return (
            self._obs[idx].copy(),
            self._actions[idx].copy(),
            self._rewards[idx].copy(),
            self._next_obs[idx].copy(),
            self._dones[idx].copy(),
        )


@dataclass
class AgentCheckpoint:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    target_weights: list[np.ndarray]
    target_biases: list[np.ndarray]
    schedule: TrainSchedule
    env_steps: int = 0
    grad_steps: int = 0
    episodes: int = 0
    root_seed: int = 0
    rng_states: dict = field(default_factory=dict)

    def network(self) -> QNetwork:
        return QNetwork([w.copy() for w in self.weights], [b.copy() for b in self.biases])


def save_checkpoint(path: str | Path, ckpt: AgentCheckpoint) -> None:
    """Self-describing npz: named float64 arrays plus a JSON metadata blob."""
    arrays = {}
    for i, (w, b) in enumerate(zip(ckpt.weights, ckpt.biases)):
        arrays[f"w{i}"] = w
        arrays[f"b{i}"] = b
    for i, (w, b) in enumerate(zip(ckpt.target_weights, ckpt.target_biases)):
        arrays[f"target_w{i}"] = w
        arrays[f"target_b{i}"] = b
    meta = {
        "n_layers": len(ckpt.weights),
        "schedule": {**asdict(ckpt.schedule), "hidden": list(ckpt.schedule.hidden)},
        "env_steps": ckpt.env_steps,
        "grad_steps": ckpt.grad_steps,
        "episodes": ckpt.episodes,
        "root_seed": ckpt.root_seed,
        "rng_states": ckpt.rng_states,
    }
    arrays["meta_json"] = np.frombuffer(
        json.dumps(meta, sort_keys=True).encode("utf-8"), dtype=np.uint8
    )
    np.savez(path, **arrays)


def load_checkpoint(path: str | Path) -> AgentCheckpoint:
    data = np.load(path)
    meta = json.loads(bytes(data["meta_json"]).decode("utf-8"))
    n = meta["n_layers"]
    sched = dict(meta["schedule"])
    sched["hidden"] = tuple(sched["hidden"])
    return AgentCheckpoint(
        weights=[data[f"w{i}"].astype(np.float64) for i in range(n)],
        biases=[data[f"b{i}"].astype(np.float64) for i in range(n)],
        target_weights=[data[f"target_w{i}"].astype(np.float64) for i in range(n)],
        target_biases=[data[f"target_b{i}"].astype(np.float64) for i in range(n)],
        schedule=TrainSchedule(**sched),
        env_steps=int(meta["env_steps"]),
        grad_steps=int(meta["grad_steps"]),
        episodes=int(meta["episodes"]),
        root_seed=int(meta["root_seed"]),
        rng_states=meta["rng_states"],
    )


def train(env, schedule: TrainSchedule, seed: int, resume: AgentCheckpoint | None = None):
    """Run the training loop to schedule.total_steps environment steps.

    Returns (checkpoint, episode_logs); logs carry one row per completed
    episode: episode, steps, return, epsilon, loss_mean. A resumed run picks
    the epsilon schedule up exactly where the checkpoint left it.
    """
    obs_dim = env.observation_size()
    n_actions = env.action_count()
    explore_rng = derive_rng(seed, STREAM_AGENT_EXPLORE)
    replay_rng = derive_rng(seed, STREAM_AGENT_REPLAY)
    if resume is not None:
        net = QNetwork([w.copy() for w in resume.weights], [b.copy() for b in resume.biases])
        target = QNetwork(
            [w.copy() for w in resume.target_weights],
            [b.copy() for b in resume.target_biases],
        )
        env_steps = resume.env_steps
        grad_steps = resume.grad_steps
        episodes = resume.episodes
        if resume.rng_states:
            explore_rng.bit_generator.state = resume.rng_states["explore"]
            replay_rng.bit_generator.state = resume.rng_states["replay"]
    else:
        init_rng = derive_rng(seed, STREAM_AGENT_INIT)
        net = QNetwork.initialize(obs_dim, init_rng, schedule.hidden, n_actions)
        target = net.copy()
        env_steps = grad_steps = episodes = 0
    if net.obs_dim != obs_dim:
        raise ValueError(
            f"checkpoint input size {net.obs_dim} does not match environment "
            f"observation size {obs_dim}"
        )

    buffer = ReplayBuffer(schedule.buffer_capacity, obs_dim)
    logs: list[dict] = []
    obs = env.reset(seed=derive_seed(seed, STREAM_TRAIN_EPISODE, episodes))
    ep_return = 0.0
    ep_steps = 0
    ep_losses: list[float] = []
    epsilon = schedule.epsilon_at(env_steps)

    while env_steps < schedule.total_steps:
        epsilon = schedule.epsilon_at(env_steps)
        action = act(net, obs, epsilon, explore_rng)
        result = env.step(action)
        buffer.push(Transition(obs, action, result.reward, result.observation, result.done))
        obs = result.observation
        env_steps += 1
        ep_steps += 1
        ep_return += result.reward

        if len(buffer) >= schedule.learning_starts:
            batch = buffer.sample(schedule.batch_size, replay_rng)
            ep_losses.append(td_update(net, target, batch, schedule))
            grad_steps += 1
            if grad_steps % schedule.target_sync_period == 0:
                target = net.copy()

        if result.done:
            logs.append(
                {
                    "episode": episodes,
                    "steps": ep_steps,
                    "return": ep_return,
                    "epsilon": epsilon,
                    "loss_mean": float(np.mean(ep_losses)) if ep_losses else float("nan"),
                }
            )
            episodes += 1
            ep_return = 0.0
            ep_steps = 0
            ep_losses = []
            if env_steps < schedule.total_steps:
                obs = env.reset(seed=derive_seed(seed, STREAM_TRAIN_EPISODE, episodes))

    ckpt = AgentCheckpoint(
        weights=net.weights,
        biases=net.biases,
        target_weights=target.weights,
        target_biases=target.biases,
        schedule=schedule,
        env_steps=env_steps,
        grad_steps=grad_steps,
        episodes=episodes,
        root_seed=seed,
        rng_states={
            "explore": explore_rng.bit_generator.state,
            "replay": replay_rng.bit_generator.state,
        },
    )
    return ckpt, logs
