"""Scenario configuration: YAML parsing with per-kind defaults, strict key
validation with path-qualified error messages, and lossless serialization."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import yaml

from .agent import TrainSchedule
from .env import RewardSpec
from .linksim import INGRESS_LINK, TrafficConfig, fap_link_name
from .phy import RadioConfig
from .ra import MinstrelConfig
from .venue import Position, Venue, WaypointSchedule, position_at

KINDS = ("asymmetric", "moving-fap", "two-faps", "custom")


class ConfigError(Exception):
    """Invalid or inconsistent scenario configuration."""


@dataclass(frozen=True)
class Scenario:
    kind: str
    venue: Venue
    backhaul: Position
    fgw_start: Position
    fap_schedules: tuple[WaypointSchedule, ...]
    radios: dict[str, RadioConfig]
    traffic: TrafficConfig
    ra_algorithm: str
    minstrel: MinstrelConfig
    mac_efficiency: float
    reward: RewardSpec
    horizon_steps: int
    seed: int
    train: TrainSchedule = field(default_factory=TrainSchedule)

    @property
    def n_faps(self) -> int:
        return len(self.fap_schedules)

    @property
    def link_names(self) -> list[str]:
        return [INGRESS_LINK] + [fap_link_name(i) for i in range(self.n_faps)]


_VENUE_KEYS = {"width_m", "height_m", "step_m", "decision_interval_s"}
_POSITION_KEYS = {"x_m", "y_m"}
_WAYPOINT_KEYS = {"t_s", "x_m", "y_m"}
_FAP_KEYS = _POSITION_KEYS | {"waypoints"}
_RADIO_KEYS = {
    "tx_power_dbm",
    "tx_gain_dbi",
    "rx_gain_dbi",
    "frequency_hz",
    "bandwidth_hz",
    "noise_figure_db",
}
_TRAFFIC_KEYS = {"udp_rate_bps", "packet_size_bytes"}
_RA_KEYS = {"algorithm", "ewma_weight", "update_interval_s", "probe_period", "probe_fraction"}
_REWARD_KEYS = {"mode", "imbalance_weight"}
_TRAIN_KEYS = {
    "gamma",
    "learning_rate",
    "batch_size",
    "target_sync_period",
    "epsilon_start",
    "epsilon_end",
    "epsilon_decay_steps",
    "total_steps",
    "buffer_capacity",
    "learning_starts",
    "grad_clip_norm",
    "hidden",
}
_TOP_KEYS = {
    "kind",
    "seed",
    "venue",
    "backhaul",
    "fgw_start",
    "faps",
    "radios",
    "traffic",
    "ra",
    "mac_efficiency",
    "reward",
    "horizon_steps",
    "train",
}

_DEFAULT_RADIO = {
    "tx_power_dbm": 20.0,
    "tx_gain_dbi": 0.0,
    "rx_gain_dbi": 0.0,
    "frequency_hz": 5.18e9,
    "bandwidth_hz": 20e6,
    "noise_figure_db": 7.0,
}

_COMMON_DEFAULTS = {
    "seed": 1,
    "venue": {"width_m": 1000.0, "height_m": 1000.0, "step_m": 25.0, "decision_interval_s": 1.0},
    "traffic": {"udp_rate_bps": 70e6, "packet_size_bytes": 1400},
    "ra": {"algorithm": "minstrel", "ewma_weight": 0.25, "update_interval_s": 0.1, "probe_period": 10, "probe_fraction": 0.25},
    "mac_efficiency": 0.75,
    "train": {},
}


def scenario_defaults(kind: str) -> dict:
    """Complete default configuration mapping for a scenario kind."""
    if kind not in KINDS:
        raise ConfigError(f"unknown scenario kind: {kind!r}")
    base = copy.deepcopy(_COMMON_DEFAULTS)
    base["kind"] = kind
    if kind == "asymmetric":
        base["backhaul"] = {"x_m": 0.0, "y_m": 0.0}
        base["fgw_start"] = {"x_m": 500.0, "y_m": 500.0}
        base["faps"] = [{"x_m": 1000.0, "y_m": 1000.0}]
        base["radios"] = {
            INGRESS_LINK: {**_DEFAULT_RADIO, "tx_power_dbm": 15.0},
            fap_link_name(0): dict(_DEFAULT_RADIO),
        }
        base["reward"] = {"mode": "snr-balance", "imbalance_weight": 2.0}
        base["horizon_steps"] = 120
    elif kind == "moving-fap":
        base["backhaul"] = {"x_m": 0.0, "y_m": 0.0}
        base["fgw_start"] = {"x_m": 400.0, "y_m": 400.0}
        # 20 s per segment: hold, travel, hold, travel, then hold to episode end
        base["faps"] = [
            {
                "waypoints": [
                    {"t_s": 0.0, "x_m": 600.0, "y_m": 600.0},
                    {"t_s": 20.0, "x_m": 600.0, "y_m": 600.0},
                    {"t_s": 40.0, "x_m": 1000.0, "y_m": 1000.0},
                    {"t_s": 60.0, "x_m": 1000.0, "y_m": 1000.0},
                    {"t_s": 80.0, "x_m": 700.0, "y_m": 300.0},
                ]
            }
        ]
        base["radios"] = {
            INGRESS_LINK: dict(_DEFAULT_RADIO),
            fap_link_name(0): dict(_DEFAULT_RADIO),
        }
        base["reward"] = {"mode": "snr-balance", "imbalance_weight": 2.0}
        base["horizon_steps"] = 110  # schedule end + 30 settle steps
    elif kind == "two-faps":
        base["backhaul"] = {"x_m": 0.0, "y_m": 500.0}
        base["fgw_start"] = {"x_m": 25.0, "y_m": 25.0}
        base["faps"] = [{"x_m": 1000.0, "y_m": 1000.0}, {"x_m": 1000.0, "y_m": 0.0}]
        # the two gateway-to-FAP links are the symmetric pair; the ingress link
        # runs slightly weaker so it acts as the bottleneck of the relay
        base["radios"] = {
            INGRESS_LINK: {**_DEFAULT_RADIO, "tx_power_dbm": 17.0},
            fap_link_name(0): dict(_DEFAULT_RADIO),
            fap_link_name(1): dict(_DEFAULT_RADIO),
        }
        base["reward"] = {"mode": "throughput-balance", "imbalance_weight": 2.0}
        base["horizon_steps"] = 120
    else:  # custom: topology must be provided explicitly
        base["reward"] = {}
        base["horizon_steps"] = 120
    return base


def _check_keys(mapping: dict, allowed: set[str], path: str) -> None:
    if not isinstance(mapping, dict):
        raise ConfigError(f"{path}: expected a mapping")
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"{path}: unknown key {key!r}")


def _merge(defaults, override, path: str):
    """Recursive dict merge; lists and scalars replace wholesale."""
    if isinstance(defaults, dict) and isinstance(override, dict):
        out = dict(defaults)
        for k, v in override.items():
            out[k] = _merge(defaults.get(k), v, f"{path}.{k}") if k in defaults else v
        return out
    return copy.deepcopy(override)


def _number(mapping: dict, key: str, path: str, positive: bool = False) -> float:
    if key not in mapping:
        raise ConfigError(f"{path}: missing required key {key!r}")
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number")
    if positive and value <= 0:
        raise ConfigError(f"{path}.{key}: must be positive")
    return float(value)


def _position(mapping: dict, path: str) -> Position:
    _check_keys(mapping, _POSITION_KEYS, path)
    return Position(_number(mapping, "x_m", path), _number(mapping, "y_m", path))


def _require_inside(p: Position, venue: Venue, path: str) -> None:
    if not venue.contains(p):
        raise ConfigError(f"{path}: position ({p.x:g}, {p.y:g}) is outside the venue")


def parse_config(text: str) -> Scenario:
    """Parse and validate a YAML scenario description."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a mapping")
    if "kind" not in raw:
        raise ConfigError("top level: missing required key 'kind'")
    kind = raw["kind"]
    if kind not in KINDS:
        raise ConfigError(f"kind: must be one of {', '.join(KINDS)}; got {kind!r}")
    _check_keys(raw, _TOP_KEYS, "top level")

    merged = _merge(scenario_defaults(kind), raw, "top level")
    return build_scenario(merged)


def parse_config_file(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def build_scenario(cfg: dict) -> Scenario:
    _check_keys(cfg, _TOP_KEYS, "top level")
    kind = cfg["kind"]

    venue_cfg = cfg.get("venue", {})
    _check_keys(venue_cfg, _VENUE_KEYS, "venue")
    try:
        venue = Venue(
            width=_number(venue_cfg, "width_m", "venue", positive=True),
            height=_number(venue_cfg, "height_m", "venue", positive=True),
            step=_number(venue_cfg, "step_m", "venue", positive=True),
            decision_interval=_number(venue_cfg, "decision_interval_s", "venue", positive=True),
        )
    except ValueError as exc:
        raise ConfigError(f"venue: {exc}") from exc

    for key in ("backhaul", "fgw_start", "faps", "reward", "horizon_steps"):
        if key not in cfg or cfg[key] in (None, {}):
            if key == "reward" and cfg.get(key) == {}:
                raise ConfigError("reward: missing required key 'mode'")
            raise ConfigError(f"top level: missing required key {key!r}")

    backhaul = _position(cfg["backhaul"], "backhaul")
    _require_inside(backhaul, venue, "backhaul")
    fgw_start = _position(cfg["fgw_start"], "fgw_start")
    _require_inside(fgw_start, venue, "fgw_start")
    if not venue.is_grid_aligned(fgw_start):
        raise ConfigError(
            f"fgw_start: ({fgw_start.x:g}, {fgw_start.y:g}) is not aligned to the "
            f"{venue.step:g} m grid"
        )

    faps_cfg = cfg["faps"]
    if not isinstance(faps_cfg, list) or not faps_cfg:
        raise ConfigError("faps: expected a non-empty list")
    if len(faps_cfg) > 2:
        raise ConfigError("faps: at most two FAPs are supported")
    schedules = []
    for i, item in enumerate(faps_cfg):
        path = f"faps[{i}]"
        _check_keys(item, _FAP_KEYS, path)
        if "waypoints" in item:
            if _POSITION_KEYS & set(item):
                raise ConfigError(f"{path}: give either x_m/y_m or waypoints, not both")
            wps = item["waypoints"]
            if not isinstance(wps, list) or not wps:
                raise ConfigError(f"{path}.waypoints: expected a non-empty list")
            parsed = []
            for j, wp in enumerate(wps):
                wp_path = f"{path}.waypoints[{j}]"
                _check_keys(wp, _WAYPOINT_KEYS, wp_path)
                t = _number(wp, "t_s", wp_path)
                if t < 0:
                    raise ConfigError(f"{wp_path}.t_s: must be non-negative")
                target = Position(_number(wp, "x_m", wp_path), _number(wp, "y_m", wp_path))
                _require_inside(target, venue, wp_path)
                parsed.append((t, target))
            try:
                schedules.append(WaypointSchedule(tuple(parsed)))
            except ValueError as exc:
                raise ConfigError(f"{path}.waypoints: {exc}") from exc
        else:
            p = _position(item, path)
            _require_inside(p, venue, path)
            schedules.append(WaypointSchedule.stationary(p))
    fap_schedules = tuple(schedules)

    link_names = [INGRESS_LINK] + [fap_link_name(i) for i in range(len(fap_schedules))]
    radios_cfg = cfg.get("radios") or {}
    _check_keys(radios_cfg, set(link_names), "radios")
    radios = {}
    for name in link_names:
        link_cfg = {**_DEFAULT_RADIO, **(radios_cfg.get(name) or {})}
        _check_keys(link_cfg, _RADIO_KEYS, f"radios.{name}")
        try:
            radios[name] = RadioConfig(
                tx_power_dbm=_number(link_cfg, "tx_power_dbm", f"radios.{name}"),
                tx_gain_dbi=_number(link_cfg, "tx_gain_dbi", f"radios.{name}"),
                rx_gain_dbi=_number(link_cfg, "rx_gain_dbi", f"radios.{name}"),
                frequency_hz=_number(link_cfg, "frequency_hz", f"radios.{name}", positive=True),
                bandwidth_hz=_number(link_cfg, "bandwidth_hz", f"radios.{name}", positive=True),
                noise_figure_db=_number(link_cfg, "noise_figure_db", f"radios.{name}"),
            )
        except ValueError as exc:
            raise ConfigError(f"radios.{name}: {exc}") from exc

    traffic_cfg = cfg.get("traffic", {})
    _check_keys(traffic_cfg, _TRAFFIC_KEYS, "traffic")
    try:
        traffic = TrafficConfig(
            udp_rate_bps=_number(traffic_cfg, "udp_rate_bps", "traffic", positive=True),
            packet_size_bytes=int(_number(traffic_cfg, "packet_size_bytes", "traffic", positive=True)),
        )
    except ValueError as exc:
        raise ConfigError(f"traffic: {exc}") from exc

    ra_cfg = cfg.get("ra", {})
    _check_keys(ra_cfg, _RA_KEYS, "ra")
    algorithm = ra_cfg.get("algorithm", "minstrel")
    if algorithm not in ("minstrel", "ideal"):
        raise ConfigError(f"ra.algorithm: must be 'minstrel' or 'ideal'; got {algorithm!r}")
    try:
        minstrel = MinstrelConfig(
            ewma_weight=_number(ra_cfg, "ewma_weight", "ra"),
            update_interval_s=_number(ra_cfg, "update_interval_s", "ra", positive=True),
            probe_period=int(_number(ra_cfg, "probe_period", "ra", positive=True)),
            probe_fraction=_number(ra_cfg, "probe_fraction", "ra", positive=True),
        )
    except ValueError as exc:
        raise ConfigError(f"ra: {exc}") from exc

    reward_cfg = cfg["reward"]
    _check_keys(reward_cfg, _REWARD_KEYS, "reward")
    if "mode" not in reward_cfg:
        raise ConfigError("reward: missing required key 'mode'")
    try:
        reward = RewardSpec(
            mode=reward_cfg["mode"],
            imbalance_weight=float(reward_cfg.get("imbalance_weight", 2.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"reward: {exc}") from exc
    if reward.mode == "snr-balance" and len(fap_schedules) != 1:
        raise ConfigError("reward.mode: snr-balance requires exactly one FAP")

    mac_eff = cfg.get("mac_efficiency", 0.75)
    if not isinstance(mac_eff, (int, float)) or isinstance(mac_eff, bool) or not 0 < mac_eff <= 1:
        raise ConfigError("mac_efficiency: must be a number in (0, 1]")

    horizon = cfg["horizon_steps"]
    if not isinstance(horizon, int) or isinstance(horizon, bool) or horizon <= 0:
        raise ConfigError("horizon_steps: must be a positive integer")

    seed = cfg.get("seed", 1)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed: must be a non-negative integer")

    train_cfg = dict(cfg.get("train") or {})
    _check_keys(train_cfg, _TRAIN_KEYS, "train")
    if "hidden" in train_cfg:
        hidden = train_cfg["hidden"]
        if not isinstance(hidden, list) or not all(isinstance(h, int) and h > 0 for h in hidden):
            raise ConfigError("train.hidden: expected a list of positive integers")
        train_cfg["hidden"] = tuple(hidden)
    for int_key in ("batch_size", "target_sync_period", "epsilon_decay_steps",
                    "total_steps", "buffer_capacity", "learning_starts"):
        if int_key in train_cfg:
            train_cfg[int_key] = int(train_cfg[int_key])
    try:
        train = TrainSchedule(**train_cfg)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"train: {exc}") from exc

    return Scenario(
        kind=kind,
        venue=venue,
        backhaul=backhaul,
        fgw_start=fgw_start,
        fap_schedules=fap_schedules,
        radios=radios,
        traffic=traffic,
        ra_algorithm=algorithm,
        minstrel=minstrel,
        mac_efficiency=float(mac_eff),
        reward=reward,
        horizon_steps=horizon,
        seed=seed,
        train=train,
    )


def scenario_to_dict(s: Scenario) -> dict:
    """Plain mapping that parses back to an equal scenario."""
    faps = []
    for sched in s.fap_schedules:
        if len(sched.waypoints) == 1:
            p = sched.waypoints[0][1]
            faps.append({"x_m": p.x, "y_m": p.y})
        else:
            faps.append(
                {
                    "waypoints": [
                        {"t_s": t, "x_m": p.x, "y_m": p.y} for t, p in sched.waypoints
                    ]
                }
            )
    return {
        "kind": s.kind,
        "seed": s.seed,
        "venue": {
            "width_m": s.venue.width,
            "height_m": s.venue.height,
            "step_m": s.venue.step,
            "decision_interval_s": s.venue.decision_interval,
        },
        "backhaul": {"x_m": s.backhaul.x, "y_m": s.backhaul.y},
        "fgw_start": {"x_m": s.fgw_start.x, "y_m": s.fgw_start.y},
        "faps": faps,
        "radios": {
            name: {
                "tx_power_dbm": r.tx_power_dbm,
                "tx_gain_dbi": r.tx_gain_dbi,
                "rx_gain_dbi": r.rx_gain_dbi,
                "frequency_hz": r.frequency_hz,
                "bandwidth_hz": r.bandwidth_hz,
                "noise_figure_db": r.noise_figure_db,
            }
            for name, r in s.radios.items()
        },
        "traffic": {
            "udp_rate_bps": s.traffic.udp_rate_bps,
            "packet_size_bytes": s.traffic.packet_size_bytes,
        },
        "ra": {
            "algorithm": s.ra_algorithm,
            "ewma_weight": s.minstrel.ewma_weight,
            "update_interval_s": s.minstrel.update_interval_s,
            "probe_period": s.minstrel.probe_period,
            "probe_fraction": s.minstrel.probe_fraction,
        },
        "mac_efficiency": s.mac_efficiency,
        "reward": {"mode": s.reward.mode, "imbalance_weight": s.reward.imbalance_weight},
        "horizon_steps": s.horizon_steps,
        "train": {
            "gamma": s.train.gamma,
            "learning_rate": s.train.learning_rate,
            "batch_size": s.train.batch_size,
            "target_sync_period": s.train.target_sync_period,
            "epsilon_start": s.train.epsilon_start,
            "epsilon_end": s.train.epsilon_end,
            "epsilon_decay_steps": s.train.epsilon_decay_steps,
            "total_steps": s.train.total_steps,
            "buffer_capacity": s.train.buffer_capacity,
            "learning_starts": s.train.learning_starts,
            "grad_clip_norm": s.train.grad_clip_norm,
            "hidden": list(s.train.hidden),
        },
    }


def serialize_config(s: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(s), sort_keys=True)


def scenario_start_fap_positions(s: Scenario) -> tuple[Position, ...]:
    return tuple(position_at(sched, 0.0) for sched in s.fap_schedules)
