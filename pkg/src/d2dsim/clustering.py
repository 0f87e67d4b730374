"""CU-seeded Lloyd k-means with a CU coverage repair step.

Shard ``i`` is seeded at the ``i``-th CU point.  The assignment sweep uses
squared Euclidean distance with a strict ``<`` so the lowest shard id wins
ties.  A shard that loses all its members keeps its previous centroid.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Sequence

from d2dsim.topology import MAX_DIST, UNASSIGNED, NodeType, Point


class ClusteringError(ValueError):
    pass


class InsufficientCUError(ClusteringError):
    """Fewer CU points than requested shards."""


@dataclass(frozen=True)
class Centroid:
    x: float
    y: float
    shard_id: int

    def to_dict(self) -> dict[str, Any]:
        return {"x": self.x, "y": self.y, "shard_id": self.shard_id}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Centroid:
        return cls(d["x"], d["y"], d["shard_id"])


@dataclass(frozen=True)
class Clustering:
    centroids: tuple[Centroid, ...]
    assignments: tuple[int, ...]
    iterations_run: int
    objective: float

    @property
    def k(self) -> int:
        return len(self.centroids)

    def to_dict(self, points: Sequence[Point]) -> dict[str, Any]:
        if len(points) != len(self.assignments):
            raise ClusteringError("points and assignments differ in length")
        return {
            "centroids": [c.to_dict() for c in self.centroids],
            "assignments": [
                {
                    "node_id_1": p.node_id_1,
                    "node_id_2": p.node_id_2,
                    "node_type": int(p.node_type),
                    "shard": shard,
                }
                for p, shard in zip(points, self.assignments)
            ],
            "iterations_run": self.iterations_run,
            "objective": self.objective,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Clustering:
        return cls(
            centroids=tuple(Centroid.from_dict(c) for c in d["centroids"]),
            assignments=tuple(a["shard"] for a in d["assignments"]),
            iterations_run=d["iterations_run"],
            objective=d["objective"],
        )


def squared_distance(p, q) -> float:
    """Squared planar distance between two objects with ``x``/``y``."""
    dx = p.x - q.x
    dy = p.y - q.y
    return dx * dx + dy * dy


def seed_centroids(points: Sequence[Point], k: int) -> list[Centroid]:
    cus = [p for p in points if p.node_type == NodeType.CU]
    if k < 1:
        raise ClusteringError(f"shard count must be >= 1, got {k}")
    if len(cus) < k:
        raise InsufficientCUError(f"need {k} CU points to seed {k} shards, found {len(cus)}")
    return [Centroid(p.x, p.y, i) for i, p in enumerate(cus[:k])]


def assign_points(points: Sequence[Point], centroids: Sequence[Centroid]) -> list[int]:
    """Attach every point to its nearest centroid, in place.

    Resets each point's ``min_dist`` before scanning, then writes ``cluster``
    and ``min_dist``.  Returns the shard index per point.
    """
    if not centroids:
        raise ClusteringError("no centroids to assign to")
    for p in points:
        p.min_dist = MAX_DIST
        p.cluster = UNASSIGNED
        for c in centroids:
            d = squared_distance(p, c)
            if d < p.min_dist:
                p.min_dist = d
                p.cluster = c.shard_id
    return [p.cluster for p in points]


def update_centroids(
    points: Sequence[Point],
    k: int,
    previous: Sequence[Centroid] | None = None,
    assignments: Sequence[int] | None = None,
) -> list[Centroid]:
    """Move each shard's centroid to the mean of its members.

    Membership is read from ``assignments`` when given, else from each point's
    ``cluster``.  Empty shards keep their ``previous`` position; without one
    an empty shard is an error.
    """
    if assignments is None:
        assignments = [p.cluster for p in points]
    counts = [0] * k
    sum_x = [0.0] * k
    sum_y = [0.0] * k
    for p, shard in zip(points, assignments):
        if not 0 <= shard < k:
            raise ClusteringError(f"point {p.node_id_1} has no valid shard ({shard})")
        counts[shard] += 1
        sum_x[shard] += p.x
        sum_y[shard] += p.y

    out = []
    for shard in range(k):
        if counts[shard]:
            out.append(Centroid(sum_x[shard] / counts[shard], sum_y[shard] / counts[shard], shard))
        elif previous is not None:
            out.append(replace(previous[shard], shard_id=shard))
        else:
            raise ClusteringError(f"shard {shard} is empty and has no previous centroid")
    return out


def objective(
    points: Sequence[Point], centroids: Sequence[Centroid], assignments: Sequence[int]
) -> float:
    """Within-shard sum of squared distances."""
    return sum(squared_distance(p, centroids[a]) for p, a in zip(points, assignments))


def kmeans(
    points: Sequence[Point],
    k: int,
    max_iter: int = 100,
    tol: float = 1e-6,
    history: list[float] | None = None,
) -> Clustering:
    """Lloyd iteration from CU seeds.

    Stops after ``max_iter`` iterations or once no centroid moves by more
    than ``tol`` (squared meters).  When ``history`` is given, the objective
    after each update step is appended to it.

    The input points are not modified.
    """
    if max_iter < 1:
        raise ClusteringError(f"max_iter must be >= 1, got {max_iter}")
    if tol < 0:
        raise ClusteringError(f"tol must be >= 0, got {tol}")
    if len(points) < k:
        raise ClusteringError(f"cannot form {k} shards from {len(points)} points")
    work = [replace(p) for p in points]
    centroids = seed_centroids(work, k)

    assignments: list[int] = []
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        assignments = assign_points(work, centroids)
        new = update_centroids(work, k, previous=centroids, assignments=assignments)
        shift = max(squared_distance(a, b) for a, b in zip(centroids, new))
        centroids = new
        if history is not None:
            history.append(objective(work, centroids, assignments))
        if shift <= tol:
            break

    return Clustering(
        centroids=tuple(centroids),
        assignments=tuple(assignments),
        iterations_run=iterations,
        objective=objective(work, centroids, assignments),
    )


def shard_cu_counts(clustering: Clustering, points: Sequence[Point]) -> list[int]:
    counts = [0] * clustering.k
    for p, shard in zip(points, clustering.assignments):
        if p.node_type == NodeType.CU:
            counts[shard] += 1
    return counts


def enforce_cu_coverage(clustering: Clustering, points: Sequence[Point]) -> Clustering:
    """Make sure every shard holds at least one CU.

    This repair is not part of plain k-means.  Shards missing a CU are
    handled in ascending id order.  Each one takes the CU nearest its
    centroid, choosing only from shards that still have a spare CU.  Centroids
    and the objective are recomputed once, after all moves.  The input is
    returned unchanged if no shard needs repair.
    """
    counts = shard_cu_counts(clustering, points)
    if all(counts):
        return clustering

    k = clustering.k
    assignments = list(clustering.assignments)
    cu_idx = [i for i, p in enumerate(points) if p.node_type == NodeType.CU]
    for shard in range(k):
        if counts[shard]:
            continue
        target = clustering.centroids[shard]
        best = None
        best_d = MAX_DIST
        for i in cu_idx:
            if counts[assignments[i]] < 2:
                continue
            d = squared_distance(points[i], target)
            if best is None or d < best_d:
                best, best_d = i, d
        if best is None:
            raise ClusteringError(f"no spare CU available for shard {shard}")
        counts[assignments[best]] -= 1
        assignments[best] = shard
        counts[shard] += 1

    centroids = update_centroids(points, k, previous=clustering.centroids, assignments=assignments)
    return Clustering(
        centroids=tuple(centroids),
        assignments=tuple(assignments),
        iterations_run=clustering.iterations_run,
        objective=objective(points, centroids, assignments),
    )
