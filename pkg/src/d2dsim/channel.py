"""Log-distance path loss and per-pair SINR.

Each pair's client transmits to its server.  Other clients are the
co-channel interferers.  CUs and the eNB never transmit.  Fading and
shadowing are not modeled, so SINR is a deterministic function of geometry.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Iterable, Sequence

from d2dsim.topology import Position, Topology


@dataclass(frozen=True)
class ChannelModel:
    tx_power_dbm: float = 23.0
    pl0_db: float = 40.0
    d0_m: float = 1.0
    exponent: float = 3.5
    noise_dbm: float = -104.0
    min_distance_m: float = 1.0

    def __post_init__(self):
        for name in ("tx_power_dbm", "pl0_db", "d0_m", "exponent", "noise_dbm", "min_distance_m"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.exponent <= 0:
            raise ValueError(f"exponent must be > 0, got {self.exponent}")
        if self.d0_m <= 0:
            raise ValueError(f"d0_m must be > 0, got {self.d0_m}")
        if self.min_distance_m <= 0:
            raise ValueError(f"min_distance_m must be > 0, got {self.min_distance_m}")

    @property
    def noise_mw(self) -> float:
        return dbm_to_mw(self.noise_dbm)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ChannelModel:
        return cls(**d)


@dataclass(frozen=True)
class SinrResult:
    pair_index: int
    sinr_db: float
    signal_dbm: float
    interference_mw: float
    noise_mw: float


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    return 10.0 * math.log10(mw)


def distance(a: Position, b: Position) -> float:
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2)


def path_loss_db(d: float, model: ChannelModel) -> float:
    """``pl0 + 10 * exponent * log10(d / d0)``, with ``d`` clamped up to ``min_distance_m``."""
    d = max(d, model.min_distance_m)
    return model.pl0_db + 10.0 * model.exponent * math.log10(d / model.d0_m)


def received_power_dbm(tx: Position, rx: Position, model: ChannelModel) -> float:
    return model.tx_power_dbm - path_loss_db(distance(tx, rx), model)


def interferers(
    pair_index: int,
    topology: Topology,
    shards: Sequence[int] | None = None,
) -> list[Position]:
    """Transmitter positions that interfere with ``pair_index``.

    All other clients by default.  With ``shards`` (one shard per pair, in
    pair order) only clients in the same shard count.
    """
    out = []
    for pair in topology.pairs:
        if pair.pair_index == pair_index:
            continue
        if shards is not None and shards[pair.pair_index] != shards[pair_index]:
            continue
        out.append(pair.client.position)
    return out


def compute_sinr(
    pair_index: int,
    topology: Topology,
    active_tx: Iterable[Position],
    model: ChannelModel,
) -> SinrResult:
    """SINR at the server of ``pair_index`` with ``active_tx`` transmitting.

    ``active_tx`` must not contain the pair's own client.  It is taken as a
    collection rather than a set so two interferers at the same spot both
    count.  Interference is summed in milliwatts with :func:`math.fsum`,
    which makes the result independent of iteration order.
    """
    if not 0 <= pair_index < len(topology.pairs):
        raise IndexError(f"pair_index {pair_index} out of range for {len(topology.pairs)} pairs")
    pair = topology.pairs[pair_index]
    rx = pair.server.position
    signal_dbm = received_power_dbm(pair.client.position, rx, model)
    interference_mw = math.fsum(dbm_to_mw(received_power_dbm(tx, rx, model)) for tx in active_tx)
    noise_mw = model.noise_mw
    if interference_mw == 0.0:
        sinr_db = signal_dbm - model.noise_dbm
    else:
        sinr_db = signal_dbm - mw_to_dbm(interference_mw + noise_mw)
    return SinrResult(
        pair_index=pair_index,
        sinr_db=sinr_db,
        signal_dbm=signal_dbm,
        interference_mw=interference_mw,
        noise_mw=noise_mw,
    )
