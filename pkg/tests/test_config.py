import pytest

from fgwpos.config import (
    ConfigError,
    parse_config,
    scenario_defaults,
    serialize_config,
)
from fgwpos.venue import Position


class TestDefaults:
    def test_asymmetric_fills_table_defaults(self):
        sc = parse_config("kind: asymmetric")
        assert sc.traffic.udp_rate_bps == 70e6
        assert sc.traffic.packet_size_bytes == 1400
        assert sc.ra_algorithm == "minstrel"
        assert sc.radios["backhaul_fgw"].bandwidth_hz == 20e6
        assert sc.radios["backhaul_fgw"].tx_power_dbm == 15.0
        assert sc.radios["fgw_fap1"].tx_power_dbm == 20.0
        assert sc.fgw_start == Position(500, 500)
        assert sc.reward.mode == "snr-balance"
        assert sc.horizon_steps == 120

    def test_moving_fap_defaults(self):
        sc = parse_config("kind: moving-fap")
        assert sc.fgw_start == Position(400, 400)
        wps = sc.fap_schedules[0].waypoints
        assert wps[0] == (0.0, Position(600, 600))
        assert wps[-1] == (80.0, Position(700, 300))
        assert sc.horizon_steps == 110
        assert sc.reward.mode == "snr-balance"

    def test_two_faps_defaults(self):
        sc = parse_config("kind: two-faps")
        assert sc.n_faps == 2
        assert sc.fgw_start == Position(25, 25)
        assert sc.backhaul == Position(0, 500)
        assert sc.reward.mode == "throughput-balance"
        assert sc.radios["backhaul_fgw"].tx_power_dbm < sc.radios["fgw_fap1"].tx_power_dbm

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            scenario_defaults("ring")
        with pytest.raises(ConfigError, match="kind"):
            parse_config("kind: ring")

    def test_kind_required(self):
        with pytest.raises(ConfigError, match="kind"):
            parse_config("seed: 4")


class TestValidation:
    def test_out_of_venue_fap_names_field(self):
        with pytest.raises(ConfigError, match=r"faps\[0\]"):
            parse_config("kind: asymmetric\nfaps: [{x_m: 1500, y_m: 0}]")

    def test_out_of_venue_backhaul(self):
        with pytest.raises(ConfigError, match="backhaul"):
            parse_config("kind: asymmetric\nbackhaul: {x_m: -5, y_m: 0}")

    def test_unaligned_start_rejected(self):
        with pytest.raises(ConfigError, match="fgw_start"):
            parse_config("kind: asymmetric\nfgw_start: {x_m: 510, y_m: 500}")

    def test_unknown_key_rejected_with_path(self):
        with pytest.raises(ConfigError, match="turbo"):
            parse_config("kind: asymmetric\nturbo: true")
        with pytest.raises(ConfigError, match="venue"):
            parse_config("kind: asymmetric\nvenue: {width_m: 1000, depth_m: 5}")

    def test_waypoint_times_must_increase(self):
        cfg = (
            "kind: custom\n"
            "backhaul: {x_m: 0, y_m: 0}\n"
            "fgw_start: {x_m: 100, y_m: 100}\n"
            "faps: [{waypoints: ["
            "{t_s: 5, x_m: 100, y_m: 100}, {t_s: 5, x_m: 200, y_m: 200}]}]\n"
            "radios: {}\n"
            "reward: {mode: snr-balance}\n"
            "horizon_steps: 10\n"
        )
        with pytest.raises(ConfigError, match="waypoint"):
            parse_config(cfg)

    def test_custom_requires_topology(self):
        with pytest.raises(ConfigError, match="backhaul"):
            parse_config("kind: custom")

    def test_snr_balance_two_faps_rejected(self):
        with pytest.raises(ConfigError, match="snr-balance"):
            parse_config("kind: two-faps\nreward: {mode: snr-balance}")

    def test_bad_ra_algorithm(self):
        with pytest.raises(ConfigError, match="algorithm"):
            parse_config("kind: asymmetric\nra: {algorithm: genie}")

    def test_step_must_divide_venue(self):
        with pytest.raises(ConfigError, match="venue"):
            parse_config("kind: asymmetric\nvenue: {step_m: 30}")

    def test_train_overrides_validated(self):
        with pytest.raises(ConfigError, match="train"):
            parse_config("kind: asymmetric\ntrain: {gamma: 1.5}")
        sc = parse_config("kind: asymmetric\ntrain: {total_steps: 500, hidden: [8, 8]}")
        assert sc.train.total_steps == 500
        assert sc.train.hidden == (8, 8)


class TestRoundTrip:
    @pytest.mark.parametrize("kind", ["asymmetric", "moving-fap", "two-faps"])
    def test_serialize_parse_identity(self, kind):
        sc = parse_config(f"kind: {kind}")
        text = serialize_config(sc)
        again = parse_config(text)
        assert again == sc

    def test_override_survives_round_trip(self):
        sc = parse_config(
            "kind: asymmetric\nseed: 99\n"
            "radios: {backhaul_fgw: {tx_power_dbm: 12.5}}\n"
            "ra: {algorithm: ideal}\n"
        )
        again = parse_config(serialize_config(sc))
        assert again == sc
        assert again.radios["backhaul_fgw"].tx_power_dbm == 12.5
        assert again.ra_algorithm == "ideal"
