"""Command-line entry point.

Settings resolve as defaults < ``--config`` JSON file < command-line flags.
The output directory defaults to ``$D2DSIM_OUT`` or ``./out``.

Example:
    d2dsim --pairs 10 --cus 3 --seed 7 --out results/
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields
from pathlib import Path

from d2dsim.channel import ChannelModel
from d2dsim.clustering import ClusteringError
from d2dsim.report import check_invariants, emit_reports
from d2dsim.simulation import ConfigError, SimConfig, run
from d2dsim.topology import AddressCapacityError, TopologyError

OUT_ENV = "D2DSIM_OUT"

# flag dest -> SimConfig field
SIM_FLAGS = {
    "pairs": "n",
    "cus": "k",
    "seed": "seed",
    "region": "region",
    "pair_offset": "pair_offset",
    "sim_start": "start_s",
    "sim_end": "end_s",
    "interval": "interval_s",
    "same_shard_interference": "same_shard_interference",
    "max_iter": "max_iter",
    "tol": "tol",
}
# flag dest -> ChannelModel field
CHANNEL_FLAGS = {
    "tx_power": "tx_power_dbm",
    "pl_exponent": "exponent",
    "noise": "noise_dbm",
}
FIELD_TO_FLAG = {v: "--" + k.replace("_", "-") for k, v in {**SIM_FLAGS, **CHANNEL_FLAGS}.items()}


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _non_negative_float(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"must be an unsigned 64-bit integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="d2dsim",
        description="Shard D2D pairs and cellular users by distance and sample per-pair SINR.",
    )
    p.add_argument("--config", type=Path, help="JSON file with SimConfig fields")
    p.add_argument("--pairs", type=_positive_int, help="number of D2D pairs (default 10)")
    p.add_argument("--cus", type=_positive_int, help="number of cellular users and shards (default 3)")
    p.add_argument("--seed", type=_seed, help="64-bit RNG seed (default 0)")
    p.add_argument("--region", type=_positive_float, help="side of the placement square in m (default 50)")
    p.add_argument("--pair-offset", type=_non_negative_float, help="client-to-server offset per axis in m (default 10)")
    p.add_argument("--sim-start", type=_non_negative_float, help="first sampling time in s (default 2.5)")
    p.add_argument("--sim-end", type=_non_negative_float, help="last allowed sampling time in s (default 6.0)")
    p.add_argument("--interval", type=_positive_float, help="sampling interval in s (default 1.0)")
    p.add_argument("--tx-power", type=float, help="transmit power in dBm (default 23)")
    p.add_argument("--pl-exponent", type=_positive_float, help="path-loss exponent (default 3.5)")
    p.add_argument("--noise", type=float, help="noise floor in dBm (default -104)")
    p.add_argument(
        "--same-shard-interference",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="only clients in the same shard interfere (default: all clients)",
    )
    p.add_argument("--max-iter", type=_positive_int, help="k-means iteration cap (default 100)")
    p.add_argument("--tol", type=_non_negative_float, help="k-means convergence threshold in m^2 (default 1e-6)")
    p.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or ./out)")
    p.add_argument("--quiet", action="store_true", help="do not print the tables")
    return p


def _load_config_file(parser: argparse.ArgumentParser, path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        parser.error(f"argument --config: cannot read {path}: {e}")
    if not isinstance(data, dict):
        parser.error(f"argument --config: {path} must hold a JSON object")
    known = {f.name for f in fields(SimConfig)}
    for key in data:
        if key not in known:
            parser.error(f"argument --config: unknown key {key!r} in {path}")
    channel = data.get("channel", {})
    if not isinstance(channel, dict):
        parser.error(f"argument --config: 'channel' in {path} must be an object")
    channel_known = {f.name for f in fields(ChannelModel)}
    for key in channel:
        if key not in channel_known:
            parser.error(f"argument --config: unknown key 'channel.{key}' in {path}")
    return data


def _resolve(parser: argparse.ArgumentParser, args: argparse.Namespace) -> SimConfig:
    values = _load_config_file(parser, args.config) if args.config else {}
    channel = dict(values.pop("channel", {}))
    for dest, name in SIM_FLAGS.items():
        if getattr(args, dest) is not None:
            values[name] = getattr(args, dest)
    for dest, name in CHANNEL_FLAGS.items():
        if getattr(args, dest) is not None:
            channel[name] = getattr(args, dest)
    try:
        model = ChannelModel(**channel)
    except (TypeError, ValueError) as e:
        parser.error(f"channel settings: {e}")
    try:
        return SimConfig(**values, channel=model)
    except ConfigError as e:
        flag = FIELD_TO_FLAG.get(e.field, e.field)
        parser.error(f"argument {flag}: {e}")
    except TypeError as e:
        parser.error(f"argument --config: {e}")


def parse_args(argv: list[str] | None = None) -> tuple[SimConfig, Path, bool]:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _resolve(parser, args)
    out = args.out or Path(os.environ.get(OUT_ENV) or "out")
    return config, out, args.quiet


def parse_config(argv: list[str] | None = None) -> SimConfig:
    """Build a validated SimConfig from command-line arguments.

    Exits with status 2 and a message naming the offending flag on bad input.
    """
    return parse_args(argv)[0]


def main(argv: list[str] | None = None) -> int:
    config, out, quiet = parse_args(argv)
    try:
        output = run(config)
    except AddressCapacityError as e:
        print(f"d2dsim: error: argument --pairs/--cus: {e}", file=sys.stderr)
        return 2
    except (TopologyError, ClusteringError) as e:
        print(f"d2dsim: error: {e}", file=sys.stderr)
        return 2

    problems = check_invariants(output)
    try:
        emit_reports(output, out, stream=None if quiet else sys.stdout)
    except OSError as e:
        print(f"d2dsim: error: cannot write reports to {out}: {e}", file=sys.stderr)
        return 1
    if problems:
        for msg in problems:
            print(f"d2dsim: invariant violated: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
