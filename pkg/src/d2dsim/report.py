"""Shard table, SINR series and summary writers.

Written files:

    shards.csv  node_id,address,node_type,shard
    sinr.csv    time_s,pair_index,client_id,server_id,shard,sinr_db
    run.json    full SimOutput, readable back with SimOutput.from_dict
"""

from __future__ import annotations

import csv
import json
import sys
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from d2dsim.clustering import shard_cu_counts
from d2dsim.simulation import SimOutput
from d2dsim.topology import NodeType

SHARDS_HEADER = ("node_id", "address", "node_type", "shard")
SINR_HEADER = ("time_s", "pair_index", "client_id", "server_id", "shard", "sinr_db")


@dataclass(frozen=True)
class ShardRow:
    node_id: int
    address: str
    node_type: int
    shard: int


@dataclass(frozen=True)
class SinrRow:
    time_s: float
    pair_index: int
    client_id: int
    server_id: int
    shard: int
    sinr_db: float


@dataclass(frozen=True)
class ShardSummary:
    shard: int
    pairs: int
    cus: int


@dataclass(frozen=True)
class RunReport:
    shard_table: tuple[ShardRow, ...]
    sinr_rows: tuple[SinrRow, ...]
    shards: tuple[ShardSummary, ...]
    mean_sinr_db: tuple[float, ...]


def build_report(output: SimOutput) -> RunReport:
    topo = output.topology
    assignments = output.clustering.assignments
    pair_shard = output.pair_shards()

    rows = []
    for pair, shard in zip(topo.pairs, pair_shard):
        for node in (pair.client, pair.server):
            rows.append(ShardRow(node.node_id, node.address, int(NodeType.D2D), shard))
    for cu, shard in zip(topo.cus, assignments[topo.n :]):
        rows.append(ShardRow(cu.node_id, cu.address, int(NodeType.CU), shard))
    rows.sort(key=lambda r: r.node_id)

    sinr_rows = tuple(
        SinrRow(
            s.time_s,
            s.pair_index,
            topo.pairs[s.pair_index].client.node_id,
            topo.pairs[s.pair_index].server.node_id,
            pair_shard[s.pair_index],
            s.sinr_db,
        )
        for s in output.samples
    )

    cu_counts = shard_cu_counts(output.clustering, topo.points)
    pair_counts = [0] * output.clustering.k
    for shard in pair_shard:
        pair_counts[shard] += 1
    shards = tuple(
        ShardSummary(s, pair_counts[s], cu_counts[s]) for s in range(output.clustering.k)
    )

    per_pair = defaultdict(list)
    for s in output.samples:
        per_pair[s.pair_index].append(s.sinr_db)
    means = tuple(
        sum(per_pair[i]) / len(per_pair[i]) if per_pair[i] else float("nan")
        for i in range(topo.n)
    )
    return RunReport(tuple(rows), sinr_rows, shards, means)


def check_invariants(output: SimOutput) -> list[str]:
    """Problems that should make a run fail; empty when the output is sound."""
    problems = []
    report = build_report(output)
    by_node = {r.node_id: r.shard for r in report.shard_table}
    for pair in output.topology.pairs:
        if by_node[pair.client.node_id] != by_node[pair.server.node_id]:
            problems.append(f"pair {pair.pair_index} is split across shards")
    for s in report.shards:
        if s.cus < 1:
            problems.append(f"shard {s.shard} has no CU")
    if sum(s.pairs for s in report.shards) != output.topology.n:
        problems.append("shard pair counts do not sum to n")
    if sum(s.cus for s in report.shards) != output.topology.k:
        problems.append("shard CU counts do not sum to k")
    return problems


def write_shards_csv(report: RunReport, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(SHARDS_HEADER)
        for r in report.shard_table:
            w.writerow((r.node_id, r.address, r.node_type, r.shard))


def write_sinr_csv(report: RunReport, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(SINR_HEADER)
        for r in report.sinr_rows:
            w.writerow(
                (f"{r.time_s:.6f}", r.pair_index, r.client_id, r.server_id, r.shard, f"{r.sinr_db:.6f}")
            )


def dumps_run(output: SimOutput) -> str:
    return json.dumps(output.to_dict(), indent=2, allow_nan=False) + "\n"


def write_run_json(output: SimOutput, path: Path) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        f.write(dumps_run(output))


def load_run(path: Path) -> SimOutput:
    with open(path, encoding="utf-8") as f:
        return SimOutput.from_dict(json.load(f))


def print_summary(report: RunReport, stream: TextIO = sys.stdout) -> None:
    print(f"{'node_id':>7}  {'address':<12}  {'type':>4}  {'shard':>5}", file=stream)
    for r in report.shard_table:
        print(f"{r.node_id:>7}  {r.address:<12}  {r.node_type:>4}  {r.shard:>5}", file=stream)
    print(file=stream)
    print(f"{'shard':>5}  {'pairs':>5}  {'cus':>3}", file=stream)
    for s in report.shards:
        print(f"{s.shard:>5}  {s.pairs:>5}  {s.cus:>3}", file=stream)
    print(file=stream)
    print(f"{'pair':>4}  {'mean_sinr_db':>12}", file=stream)
    for i, m in enumerate(report.mean_sinr_db):
        print(f"{i:>4}  {m:>12.3f}", file=stream)


def emit_reports(output: SimOutput, out_dir: Path | str, stream: TextIO | None = sys.stdout) -> list[Path]:
    """Write the three report files into ``out_dir`` and return their paths.

    Prints the shard table and summaries to ``stream`` unless it is None.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = build_report(output)
    paths = [out_dir / "shards.csv", out_dir / "sinr.csv", out_dir / "run.json"]
    write_shards_csv(report, paths[0])
    write_sinr_csv(report, paths[1])
    write_run_json(output, paths[2])
    if stream is not None:
        print_summary(report, stream)
    return paths
