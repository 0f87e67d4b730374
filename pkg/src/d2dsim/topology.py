"""Node placement for a single-cell D2D network.

Creation order (and therefore node ids) is fixed:

    client0, server0, client1, server1, ..., cu0, cu1, ..., enb

Random draws come from numpy's PCG64 bit generator (PCG XSL RR 128/64),
seeded directly with the 64-bit seed.  Only raw 64-bit outputs are consumed
and mapped to [0, 1) by taking the top 53 bits, so placements do not depend
on numpy's higher-level distribution code.  Draw order is x then y for every
pair client, followed by x then y for every CU.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Any

import numpy as np

UNASSIGNED = -1
MAX_DIST = sys.float_info.max
MAX_OCTET = 254

ENB_ADDRESS = "10.0.0.1"


class TopologyError(ValueError):
    """Raised for invalid placement parameters."""


class AddressCapacityError(TopologyError):
    """Raised when a synthetic address octet would exceed 254."""


class NodeType(IntEnum):
    D2D = 0
    CU = 1
    ENB = 2


@dataclass(frozen=True)
class Position:
    x: float
    y: float
    z: float = 0.0

    def to_dict(self) -> dict[str, float]:
        return {"x": self.x, "y": self.y, "z": self.z}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Position:
        return cls(d["x"], d["y"], d["z"])


@dataclass(frozen=True)
class Node:
    node_id: int
    position: Position
    address: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "node_id": self.node_id,
            "position": self.position.to_dict(),
            "address": self.address,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Node:
        return cls(d["node_id"], Position.from_dict(d["position"]), d["address"])


@dataclass(frozen=True)
class D2DPair:
    pair_index: int
    client: Node
    server: Node

    def to_dict(self) -> dict[str, Any]:
        return {
            "pair_index": self.pair_index,
            "client": self.client.to_dict(),
            "server": self.server.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> D2DPair:
        return cls(d["pair_index"], Node.from_dict(d["client"]), Node.from_dict(d["server"]))


@dataclass
class Point:
    """Clustering-space stand-in for one CU or one whole D2D pair.

    ``cluster`` and ``min_dist`` are working state written by the assignment
    sweep; everything else is fixed at construction.
    """

    x: float
    y: float
    node_id_1: int
    node_type: NodeType
    node_id_2: int | None = None
    cluster: int = UNASSIGNED
    min_dist: float = MAX_DIST

    def to_dict(self) -> dict[str, Any]:
        return {
            "x": self.x,
            "y": self.y,
            "cluster": self.cluster,
            "node_id_1": self.node_id_1,
            "node_id_2": self.node_id_2,
            "node_type": int(self.node_type),
            "min_dist": self.min_dist,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Point:
        return cls(
            x=d["x"],
            y=d["y"],
            node_id_1=d["node_id_1"],
            node_type=NodeType(d["node_type"]),
            node_id_2=d["node_id_2"],
            cluster=d["cluster"],
            min_dist=d["min_dist"],
        )


@dataclass(frozen=True)
class Topology:
    enb: Node
    pairs: tuple[D2DPair, ...]
    cus: tuple[Node, ...]
    points: tuple[Point, ...]
    rng_seed: int = 0
    region: float = 50.0
    pair_offset: float = 10.0

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def k(self) -> int:
        return len(self.cus)

    def to_dict(self) -> dict[str, Any]:
        return {
            "enb": self.enb.to_dict(),
            "pairs": [p.to_dict() for p in self.pairs],
            "cus": [c.to_dict() for c in self.cus],
            "points": [p.to_dict() for p in self.points],
            "seed": self.rng_seed,
            "region": self.region,
            "pair_offset": self.pair_offset,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Topology:
        return cls(
            enb=Node.from_dict(d["enb"]),
            pairs=tuple(D2DPair.from_dict(p) for p in d["pairs"]),
            cus=tuple(Node.from_dict(c) for c in d["cus"]),
            points=tuple(Point.from_dict(p) for p in d["points"]),
            rng_seed=d["seed"],
            region=d["region"],
            pair_offset=d["pair_offset"],
        )


def pair_midpoint(client: Position, server: Position) -> tuple[float, float]:
    return (client.x + server.x) / 2, (client.y + server.y) / 2


class _UniformSource:
    def __init__(self, seed: int):
        self._bitgen = np.random.PCG64(seed)

    def uniform(self, high: float) -> float:
        u = (int(self._bitgen.random_raw()) >> 11) * 2.0**-53
        value = u * high
        return value if value < high else math.nextafter(high, 0.0)


def generate_topology(
    n: int,
    k: int,
    seed: int = 0,
    region: float = 50.0,
    pair_offset: float = 10.0,
) -> Topology:
    """Place ``n`` D2D pairs and ``k`` CUs uniformly in ``[0, region)^2``.

    Each server sits at its client shifted by ``pair_offset`` on both axes and
    may fall outside the region.  The eNB is at the origin.  Addresses are
    left unset; see :func:`assign_addresses`.
    """
    if n < 1:
        raise TopologyError(f"pair count must be >= 1, got {n}")
    if k < 1:
        raise TopologyError(f"CU count must be >= 1, got {k}")
    if not region > 0 or not math.isfinite(region):
        raise TopologyError(f"region must be a positive finite length, got {region}")
    if not pair_offset >= 0 or not math.isfinite(pair_offset):
        raise TopologyError(f"pair_offset must be >= 0, got {pair_offset}")
    if not 0 <= seed < 2**64:
        raise TopologyError(f"seed must fit in 64 unsigned bits, got {seed}")

    src = _UniformSource(seed)
    pairs = []
    points = []
    for i in range(n):
        x1 = src.uniform(region)
        y1 = src.uniform(region)
        client = Node(2 * i, Position(x1, y1))
        server = Node(2 * i + 1, Position(x1 + pair_offset, y1 + pair_offset))
        pairs.append(D2DPair(i, client, server))
        mx, my = pair_midpoint(client.position, server.position)
        points.append(Point(mx, my, client.node_id, NodeType.D2D, server.node_id))

    cus = []
    for j in range(k):
        pos = Position(src.uniform(region), src.uniform(region))
        cu = Node(2 * n + j, pos)
        cus.append(cu)
        points.append(Point(pos.x, pos.y, cu.node_id, NodeType.CU))

    enb = Node(2 * n + k, Position(0.0, 0.0, 0.0))
    return Topology(
        enb=enb,
        pairs=tuple(pairs),
        cus=tuple(cus),
        points=tuple(points),
        rng_seed=seed,
        region=region,
        pair_offset=pair_offset,
    )


def d2d_address(node_id: int) -> str:
    if node_id + 1 > MAX_OCTET:
        raise AddressCapacityError(f"D2D node {node_id} exceeds the 10.1.0.0/24 address range")
    return f"10.1.0.{node_id + 1}"


def cu_address(cu_index: int) -> str:
    if cu_index + 1 > MAX_OCTET:
        raise AddressCapacityError(f"CU {cu_index} exceeds the 10.2.0.0/24 address range")
    return f"10.2.0.{cu_index + 1}"


def assign_addresses(topology: Topology) -> Topology:
    """Return a copy of ``topology`` with every node's address filled in.

    D2D node ``m`` gets ``10.1.0.(m+1)``, the ``j``-th CU ``10.2.0.(j+1)``
    and the eNB ``10.0.0.1``.
    """
    pairs = tuple(
        replace(
            p,
            client=replace(p.client, address=d2d_address(p.client.node_id)),
            server=replace(p.server, address=d2d_address(p.server.node_id)),
        )
        for p in topology.pairs
    )
    cus = tuple(replace(c, address=cu_address(j)) for j, c in enumerate(topology.cus))
    return replace(
        topology,
        enb=replace(topology.enb, address=ENB_ADDRESS),
        pairs=pairs,
        cus=cus,
    )
