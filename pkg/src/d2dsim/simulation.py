"""End-to-end pipeline: place, address, shard, then sample SINR per tick."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Any

from d2dsim.channel import ChannelModel, compute_sinr, interferers
from d2dsim.clustering import Clustering, enforce_cu_coverage, kmeans
from d2dsim.topology import Topology, assign_addresses, generate_topology


class ConfigError(ValueError):
    """Invalid simulation configuration.  ``field`` names the offending setting."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class SimConfig:
    n: int = 10
    k: int = 3
    seed: int = 0
    region: float = 50.0
    pair_offset: float = 10.0
    start_s: float = 2.5
    end_s: float = 6.0
    interval_s: float = 1.0
    channel: ChannelModel = field(default_factory=ChannelModel)
    same_shard_interference: bool = False
    max_iter: int = 100
    tol: float = 1e-6

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n", f"pair count must be >= 1, got {self.n}")
        if self.k < 1:
            raise ConfigError("k", f"CU count must be >= 1, got {self.k}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {self.seed}")
        if not (math.isfinite(self.region) and self.region > 0):
            raise ConfigError("region", f"must be > 0, got {self.region}")
        if not (math.isfinite(self.pair_offset) and self.pair_offset >= 0):
            raise ConfigError("pair_offset", f"must be >= 0, got {self.pair_offset}")
        if not (math.isfinite(self.start_s) and self.start_s >= 0):
            raise ConfigError("start_s", f"must be >= 0, got {self.start_s}")
        if not (math.isfinite(self.end_s) and self.end_s >= self.start_s):
            raise ConfigError("end_s", f"must be >= start_s ({self.start_s}), got {self.end_s}")
        if not (math.isfinite(self.interval_s) and self.interval_s > 0):
            raise ConfigError("interval_s", f"must be > 0, got {self.interval_s}")
        if self.max_iter < 1:
            raise ConfigError("max_iter", f"must be >= 1, got {self.max_iter}")
        if not self.tol >= 0:
            raise ConfigError("tol", f"must be >= 0, got {self.tol}")

    def to_dict(self) -> dict[str, Any]:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["channel"] = self.channel.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> SimConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(unknown[0], "unknown configuration key")
        d = dict(d)
        if isinstance(d.get("channel"), dict):
            d["channel"] = ChannelModel.from_dict(d["channel"])
        return cls(**d)


@dataclass(frozen=True)
class SinrSample:
    time_s: float
    pair_index: int
    sinr_db: float

    def to_dict(self) -> dict[str, Any]:
        return {"time_s": self.time_s, "pair_index": self.pair_index, "sinr_db": self.sinr_db}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> SinrSample:
        return cls(d["time_s"], d["pair_index"], d["sinr_db"])


@dataclass(frozen=True)
class SimOutput:
    config: SimConfig
    topology: Topology
    clustering: Clustering
    samples: tuple[SinrSample, ...]

    def pair_shards(self) -> list[int]:
        """Shard of each pair, in pair order (pair points come first)."""
        return list(self.clustering.assignments[: self.topology.n])

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "topology": self.topology.to_dict(),
            "clustering": self.clustering.to_dict(self.topology.points),
            "samples": [s.to_dict() for s in self.samples],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> SimOutput:
        return cls(
            config=SimConfig.from_dict(d["config"]),
            topology=Topology.from_dict(d["topology"]),
            clustering=Clustering.from_dict(d["clustering"]),
            samples=tuple(SinrSample.from_dict(s) for s in d["samples"]),
        )


def schedule_ticks(start_s: float, end_s: float, interval_s: float) -> list[float]:
    """``start_s + j * interval_s`` for every integer ``j >= 0`` not past ``end_s``."""
    if not 0 <= start_s <= end_s:
        raise ConfigError("start_s", f"need 0 <= start_s <= end_s, got {start_s}, {end_s}")
    if not interval_s > 0:
        raise ConfigError("interval_s", f"must be > 0, got {interval_s}")
    ticks = []
    j = 0
    while True:
        t = start_s + j * interval_s
        if t > end_s:
            break
        ticks.append(t)
        j += 1
    return ticks


def run(config: SimConfig) -> SimOutput:
    topology = generate_topology(
        config.n, config.k, seed=config.seed, region=config.region, pair_offset=config.pair_offset
    )
    topology = assign_addresses(topology)
    clustering = kmeans(topology.points, config.k, max_iter=config.max_iter, tol=config.tol)
    clustering = enforce_cu_coverage(clustering, topology.points)

    shards = list(clustering.assignments[: topology.n])
    sinr_db = []
    for pair in topology.pairs:
        active = interferers(
            pair.pair_index, topology, shards if config.same_shard_interference else None
        )
        sinr_db.append(compute_sinr(pair.pair_index, topology, active, config.channel).sinr_db)

    samples = tuple(
        SinrSample(t, i, sinr_db[i])
        for t in schedule_ticks(config.start_s, config.end_s, config.interval_s)
        for i in range(topology.n)
    )
    return SimOutput(config=config, topology=topology, clustering=clustering, samples=samples)
