"""Run orchestration: manifest writing, training/evaluation/sweep commands,
and the stable CSV schemas the acceptance checks diff against.

Column layout is fixed per topology and units are part of the header names.
All floats are written with six decimals so replays are byte-comparable.
"""

from __future__ import annotations

import csv
import datetime
import json
from pathlib import Path

import numpy as np

from . import __version__
from .agent import AgentCheckpoint, act, load_checkpoint, save_checkpoint, train
from .baselines import BASELINE_MODES, BaselinePolicy
from .config import ConfigError, Scenario, serialize_config
from .env import RelayEnv
from .linksim import INGRESS_LINK, RelayLinkSim, fap_link_name, sweep_diagonal
from .seeds import STREAM_EVAL_EPISODE, STREAM_SWEEP, derive_seed
from .venue import distance

SUMMARY_WINDOW = 20  # intervals averaged for the per-episode summary


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def ensure_out_dir(out_dir: str | Path, force: bool) -> Path:
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()) and not force:
        raise ConfigError(f"output directory {out} is not empty; pass --force to overwrite")
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_manifest(out: Path, command: str, scenario: Scenario, seed: int, **extra) -> dict:
    manifest = {
        "command": command,
        "package_version": __version__,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "seed": seed,
        "config_yaml": serialize_config(scenario),
        **extra,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def run_train(
    scenario: Scenario,
    out_dir: str | Path,
    seed: int | None = None,
    force: bool = False,
    resume: str | Path | None = None,
) -> dict:
    out = ensure_out_dir(out_dir, force)
    root_seed = scenario.seed if seed is None else seed
    manifest = write_manifest(
        out,
        "train",
        scenario,
        root_seed,
        resume=str(resume) if resume else None,
        artifacts={"checkpoint": "checkpoint.npz", "training_log": "training_log.csv"},
    )
    env = RelayEnv(scenario)
    prev = load_checkpoint(resume) if resume else None
    ckpt, logs = train(env, scenario.train, root_seed, resume=prev)
    save_checkpoint(out / "checkpoint.npz", ckpt)
    _write_csv(
        out / "training_log.csv",
        ["episode", "steps", "return", "epsilon", "loss_mean"],
        [
            [row["episode"], row["steps"], row["return"], row["epsilon"], row["loss_mean"]]
            for row in logs
        ],
    )
    return manifest


def _trajectory_header(n_faps: int) -> list[str]:
    header = ["episode", "t_s", "fgw_x_m", "fgw_y_m",
              "snr_fgw_db", "rate_fgw", "throughput_fgw_bps"]
    for i in range(n_faps):
        header += [f"snr_fap{i + 1}_db", f"rate_fap{i + 1}", f"throughput_fap{i + 1}_bps"]
    header.append("reward")
    return header


def _summary_header(n_faps: int) -> list[str]:
    header = ["episode", "final_x_m", "final_y_m", "final_d_backhaul_m"]
    header += [f"final_d_fap{i + 1}_m" for i in range(n_faps)]
    header.append(f"mean_last{SUMMARY_WINDOW}_throughput_fgw_bps")
    header += [f"mean_last{SUMMARY_WINDOW}_throughput_fap{i + 1}_bps" for i in range(n_faps)]
    if n_faps == 2:
        header += ["fap1_fgw_ratio", "fap2_fgw_ratio"]
    header.append(f"mean_last{SUMMARY_WINDOW}_reward")
    return header


class CheckpointPolicy:
    """Greedy policy read from a saved agent checkpoint."""

    def __init__(self, path: str | Path, observation_size: int):
        ckpt = load_checkpoint(path)
        self.net = ckpt.network()
        if self.net.obs_dim != observation_size:
            raise ConfigError(
                f"checkpoint {path} expects observations of size {self.net.obs_dim}, "
                f"but the scenario produces size {observation_size}"
            )

    def __call__(self, env: RelayEnv, obs: np.ndarray) -> int:
        return act(self.net, obs, 0.0)


class BaselineRunner:
    def __init__(self, mode: str, scenario: Scenario):
        self.policy = BaselinePolicy(mode, scenario)

    def __call__(self, env: RelayEnv, obs: np.ndarray) -> int:
        return int(self.policy.action(env.fgw, env.current_faps()))


def resolve_policy(spec: str, scenario: Scenario, env: RelayEnv):
    if spec in BASELINE_MODES:
        return BaselineRunner(spec, scenario)
    path = Path(spec)
    if not path.exists():
        raise ConfigError(
            f"policy {spec!r} is neither a baseline ({', '.join(BASELINE_MODES)}) "
            f"nor an existing checkpoint file"
        )
    return CheckpointPolicy(path, env.observation_size())


def run_eval(
    scenario: Scenario,
    policy_spec: str,
    out_dir: str | Path,
    episodes: int = 5,
    seed: int | None = None,
    force: bool = False,
) -> dict:
    if episodes <= 0:
        raise ConfigError("episodes must be positive")
    out = ensure_out_dir(out_dir, force)
    root_seed = scenario.seed if seed is None else seed
    manifest = write_manifest(
        out,
        "eval",
        scenario,
        root_seed,
        policy=policy_spec,
        episodes=episodes,
        artifacts={"trajectory": "trajectory.csv", "summary": "summary.csv"},
    )
    env = RelayEnv(scenario)
    policy = resolve_policy(policy_spec, scenario, env)
    n_faps = scenario.n_faps
    link_names = [INGRESS_LINK] + [fap_link_name(i) for i in range(n_faps)]

    traj_rows: list[list] = []
    summary_rows: list[list] = []
    for ep in range(episodes):
        obs = env.reset(seed=derive_seed(root_seed, STREAM_EVAL_EPISODE, ep))
        snaps = []
        rewards = []
        done = False
        while not done:
            action = policy(env, obs)
            result = env.step(action)
            obs = result.observation
            done = result.done
            snaps.append(result.info)
            rewards.append(result.reward)
            row = [ep, result.info.t, env.fgw.x, env.fgw.y]
            for name in link_names:
                m = result.info.links[name]
                row += [m.snr_db, m.chosen_rate, m.throughput_bps]
            row.append(result.reward)
            traj_rows.append(row)

        tail = snaps[-SUMMARY_WINDOW:]
        final = snaps[-1]
        srow = [
            ep,
            env.fgw.x,
            env.fgw.y,
            distance(env.fgw, scenario.backhaul),
        ]
        srow += [distance(env.fgw, final.faps[i]) for i in range(n_faps)]
        means = {
            name: float(np.mean([s.links[name].throughput_bps for s in tail]))
            for name in link_names
        }
        srow.append(means[INGRESS_LINK])
        srow += [means[fap_link_name(i)] for i in range(n_faps)]
        if n_faps == 2:
            fgw_mean = means[INGRESS_LINK]
            for i in range(2):
                ratio = means[fap_link_name(i)] / fgw_mean if fgw_mean > 0 else 0.0
                srow.append(ratio)
        srow.append(float(np.mean(rewards[-SUMMARY_WINDOW:])))
        summary_rows.append(srow)

    _write_csv(out / "trajectory.csv", _trajectory_header(n_faps), traj_rows)
    _write_csv(out / "summary.csv", _summary_header(n_faps), summary_rows)
    return manifest


def run_sweep(
    scenario: Scenario,
    out_dir: str | Path,
    seed: int | None = None,
    force: bool = False,
) -> dict:
    for sched in scenario.fap_schedules:
        if len({p for _, p in sched.waypoints}) > 1:
            raise ConfigError("sweep requires a static scenario (no FAP waypoint motion)")
    out = ensure_out_dir(out_dir, force)
    root_seed = scenario.seed if seed is None else seed
    manifest = write_manifest(
        out, "sweep", scenario, root_seed, artifacts={"sweep": "sweep.csv"}
    )
    sim = RelayLinkSim.from_scenario(scenario, derive_seed(root_seed, STREAM_SWEEP))
    samples = sweep_diagonal(sim)
    n_faps = scenario.n_faps
    link_names = [INGRESS_LINK] + [fap_link_name(i) for i in range(n_faps)]
    header = ["fgw_x_m", "fgw_y_m", "snr_fgw_db", "rate_fgw", "throughput_fgw_bps"]
    for i in range(n_faps):
        header += [f"snr_fap{i + 1}_db", f"rate_fap{i + 1}", f"throughput_fap{i + 1}_bps"]
    rows = []
    for pos, snap in samples:
        row = [pos.x, pos.y]
        for name in link_names:
            m = snap.links[name]
            row += [m.snr_db, m.chosen_rate, m.throughput_bps]
        rows.append(row)
    _write_csv(out / "sweep.csv", header, rows)
    return manifest


def baseline_point_info(scenario: Scenario) -> dict:
    """The equal-SNR placement for a single-FAP topology, with resulting SNRs."""
    from .baselines import snr_balance_point
    from .linksim import link_snr
    from .venue import position_at

    if scenario.n_faps != 1:
        raise ConfigError("baseline-point requires a single-FAP topology")
    fap0 = position_at(scenario.fap_schedules[0], 0.0)
    radio_in = scenario.radios[INGRESS_LINK]
    radio_out = scenario.radios[fap_link_name(0)]
    exact = snr_balance_point(scenario.backhaul, fap0, radio_in, radio_out)
    snapped = scenario.venue.snap(exact)
    return {
        "exact": {"x_m": exact.x, "y_m": exact.y},
        "snapped": {"x_m": snapped.x, "y_m": snapped.y},
        "snr_fgw_db": link_snr(radio_in, scenario.backhaul, snapped),
        "snr_fap_db": link_snr(radio_out, snapped, fap0),
        "d_backhaul_m": distance(snapped, scenario.backhaul),
        "d_fap_m": distance(snapped, fap0),
    }
