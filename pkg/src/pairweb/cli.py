"""Command-line front end.

    pairweb <command> [flags]

Commands: metrics | converge | persistence | silo | river | diagnose.
Common flags: --seed --reps --delta (repeatable) --alpha (repeatable)
--horizon --n-max --grid-m --out --config <json>.  Flag values override the
config file, which overrides per-command defaults; unknown config keys are
rejected.  Exit codes: 0 success, 2 usage error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import PairwebError, UsageError
from .experiments import COMMANDS, config_from_sources, run_experiment

_FLAG_KEYS = (
    "seed", "reps", "horizon", "n_max", "grid_m", "out_dir", "mu_max_time",
    "width", "height", "fine_factor", "pairs_file", "ks_boot",
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairweb",
        description="Coalescing pair webs: metrics, samplers, experiments.")
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--seed", type=int)
        p.add_argument("--reps", type=int)
        p.add_argument("--delta", type=float, action="append",
                       help="rescaling parameter; repeatable")
        p.add_argument("--alpha", type=float, action="append",
                       help="segment / window fraction; repeatable")
        p.add_argument("--horizon", type=float)
        p.add_argument("--n-max", dest="n_max", type=int)
        p.add_argument("--grid-m", dest="grid_m", type=int)
        p.add_argument("--out", dest="out_dir")
        p.add_argument("--config", dest="config_file",
                       help="JSON file with config values")
        p.add_argument("--mu-max-time", dest="mu_max_time", type=float)
        p.add_argument("--ks-boot", dest="ks_boot", type=int)
        if name in ("silo", "river"):
            p.add_argument("--width", type=int)
            p.add_argument("--height", type=int)
        if name == "diagnose":
            p.add_argument("--epsilon", type=float, action="append",
                           help="time budget; repeatable")
        if name == "metrics":
            p.add_argument("--pairs", dest="pairs_file",
                           help="JSON file of path pairs")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        return 2
    try:
        file_values = None
        if getattr(args, "config_file", None):
            try:
                with open(args.config_file, encoding="utf-8") as fh:
                    file_values = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read config file: {exc}") from exc
        flags = {k: getattr(args, k, None) for k in _FLAG_KEYS}
        if getattr(args, "delta", None):
            flags["delta_list"] = args.delta
        if getattr(args, "alpha", None):
            flags["alpha_list"] = args.alpha
        if getattr(args, "epsilon", None):
            flags["epsilon_list"] = args.epsilon
        cfg = config_from_sources(args.command, file_values, flags)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(cfg.resolved(), indent=2, sort_keys=True))
    try:
        manifest = run_experiment(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (PairwebError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {manifest['out_dir']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
