"""Distance-based sharding of D2D pairs and cellular users, with SINR sampling."""

from d2dsim.channel import (
    ChannelModel,
    SinrResult,
    compute_sinr,
    path_loss_db,
    received_power_dbm,
)
from d2dsim.clustering import (
    Centroid,
    Clustering,
    InsufficientCUError,
    enforce_cu_coverage,
    kmeans,
)
from d2dsim.simulation import SimConfig, SimOutput, SinrSample, run, schedule_ticks
from d2dsim.topology import (
    NodeType,
    Point,
    Position,
    Topology,
    assign_addresses,
    generate_topology,
)

__all__ = [
    "Centroid",
    "ChannelModel",
    "Clustering",
    "InsufficientCUError",
    "NodeType",
    "Point",
    "Position",
    "SimConfig",
    "SimOutput",
    "SinrResult",
    "SinrSample",
    "Topology",
    "assign_addresses",
    "compute_sinr",
    "enforce_cu_coverage",
    "generate_topology",
    "kmeans",
    "path_loss_db",
    "received_power_dbm",
    "run",
    "schedule_ticks",
]
