"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, parse_config_file, serialize_config
from .runner import baseline_point_info, run_eval, run_sweep, run_train

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fgwpos",
        description="Flying-gateway positioning lab: train, evaluate and sweep "
        "relay-placement policies on the 2D link simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True):
        p.add_argument("--config", required=True, help="scenario YAML file")
        if out_required:
            p.add_argument("--out", required=True, help="output directory")
            p.add_argument("--force", action="store_true",
                           help="allow writing into a non-empty output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")

    p_train = sub.add_parser("train", help="train the positioning agent")
    common(p_train)
    p_train.add_argument("--resume", default=None, help="checkpoint to resume from")

    p_eval = sub.add_parser("eval", help="greedy rollouts of a policy")
    common(p_eval)
    p_eval.add_argument("--policy", required=True,
                        help="checkpoint path or baseline name "
                             "(snr-balance | follow-fap | centroid)")
    p_eval.add_argument("--episodes", type=int, default=5)

    p_sweep = sub.add_parser("sweep", help="diagonal link-metric sweep")
    common(p_sweep)

    p_point = sub.add_parser("baseline-point",
                             help="print the equal-SNR placement for the topology")
    common(p_point, out_required=False)

    p_val = sub.add_parser("validate-config", help="parse and echo the resolved config")
    common(p_val, out_required=False)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = parse_config_file(args.config)
        if args.command == "train":
            manifest = run_train(scenario, args.out, seed=args.seed,
                                 force=args.force, resume=args.resume)
            print(f"trained: {args.out} (seed {manifest['seed']})")
        elif args.command == "eval":
            manifest = run_eval(scenario, args.policy, args.out,
                                episodes=args.episodes, seed=args.seed, force=args.force)
            print(f"evaluated {args.policy} over {manifest['episodes']} episodes: {args.out}")
        elif args.command == "sweep":
            run_sweep(scenario, args.out, seed=args.seed, force=args.force)
            print(f"sweep written: {args.out}")
        elif args.command == "baseline-point":
            info = baseline_point_info(scenario)
            print(json.dumps(info, indent=2, sort_keys=True))
        elif args.command == "validate-config":
            sys.stdout.write(serialize_config(scenario))
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # surface runtime failures with a stable exit code
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
