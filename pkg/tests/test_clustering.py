import random

import pytest
from hypothesis import given, settings, strategies as st

from d2dsim.clustering import (
    Centroid,
    Clustering,
    ClusteringError,
    InsufficientCUError,
    assign_points,
    enforce_cu_coverage,
    kmeans,
    seed_centroids,
    squared_distance,
    update_centroids,
)
from d2dsim.topology import NodeType, Point, generate_topology

from oracles import brute_force_optimum, nearest_centroid


def cu(x, y, nid=100):
    return Point(x, y, nid, NodeType.CU)


def d2d(x, y, nid=0):
    return Point(x, y, nid, NodeType.D2D, nid + 1)


def coords(points):
    return [(p.x, p.y) for p in points]


@pytest.mark.parametrize(
    "a, b, expected",
    [((0, 0), (3, 4), 25), ((2.5, -1), (2.5, -1), 0), ((1, 1), (4, 5), 25)],
)
def test_squared_distance(a, b, expected):
    assert squared_distance(d2d(*a), cu(*b)) == expected


def test_seed_from_first_k_cus():
    pts = [d2d(9, 9), cu(1, 1), d2d(8, 8), cu(2, 2), cu(3, 3)]
    cents = seed_centroids(pts, 3)
    assert cents == [Centroid(1, 1, 0), Centroid(2, 2, 1), Centroid(3, 3, 2)]
    assert seed_centroids(pts, 2) == cents[:2]


def test_seed_ten_pair_instance():
    topo = generate_topology(10, 3, seed=5)
    cents = seed_centroids(topo.points, 3)
    assert [(c.x, c.y) for c in cents] == [(c.position.x, c.position.y) for c in topo.cus]


def test_seed_insufficient_cus():
    with pytest.raises(InsufficientCUError):
        seed_centroids([cu(0, 0), cu(1, 1), d2d(2, 2)], 3)


def test_assign_nearest():
    pts = [d2d(0, 0)]
    assert assign_points(pts, [Centroid(1, 0, 0), Centroid(5, 0, 1)]) == [0]
    assert pts[0].cluster == 0 and pts[0].min_dist == 1


def test_assign_tie_goes_to_first():
    pts = [d2d(0, 0)]
    assert assign_points(pts, [Centroid(-1, 0, 0), Centroid(1, 0, 1)]) == [0]
    assert assign_points(pts, [Centroid(0, 1, 0), Centroid(0, -1, 1), Centroid(1, 0, 2)]) == [0]


def test_assign_resets_working_distance():
    pts = [d2d(0, 0)]
    assign_points(pts, [Centroid(1, 0, 0)])
    # a farther second set of centroids must still win, not be blocked by the old min_dist
    assert assign_points(pts, [Centroid(10, 0, 0), Centroid(7, 0, 1)]) == [1]
    assert pts[0].min_dist == 49


def test_assign_matches_oracle_on_ten_pair_shape():
    topo = generate_topology(10, 3, seed=123)
    pts = list(topo.points)
    rng = random.Random(0)
    cents = [Centroid(rng.uniform(0, 60), rng.uniform(0, 60), i) for i in range(3)]
    got = assign_points([Point(**vars(p)) for p in pts], cents)
    expected = [nearest_centroid(xy, [(c.x, c.y) for c in cents]) for xy in coords(pts)]
    assert got == expected


def test_update_mean():
    pts = [d2d(0, 0), d2d(2, 2), cu(10, 4)]
    cents = update_centroids(pts, 2, assignments=[0, 0, 1])
    assert cents == [Centroid(1, 1, 0), Centroid(10, 4, 1)]


def test_update_empty_shard_keeps_previous():
    prev = [Centroid(0, 0, 0), Centroid(7, 7, 1)]
    cents = update_centroids([d2d(1, 1), d2d(3, 3)], 2, previous=prev, assignments=[0, 0])
    assert cents[1] == Centroid(7, 7, 1)
    with pytest.raises(ClusteringError):
        update_centroids([d2d(1, 1)], 2, assignments=[0])


def test_kmeans_single_shard():
    topo = generate_topology(6, 1, seed=4)
    history = []
    res = kmeans(topo.points, 1, history=history)
    assert res.assignments == (0,) * 7
    assert res.iterations_run <= 2
    mx = sum(p.x for p in topo.points) / 7
    my = sum(p.y for p in topo.points) / 7
    assert res.centroids[0].x == pytest.approx(mx, rel=1e-12)
    assert res.centroids[0].y == pytest.approx(my, rel=1e-12)


def test_kmeans_does_not_touch_input():
    topo = generate_topology(5, 2, seed=8)
    before = [p.to_dict() for p in topo.points]
    kmeans(topo.points, 2)
    assert [p.to_dict() for p in topo.points] == before


def test_kmeans_two_obvious_groups():
    # two tight groups, each seeded by a CU on the same side
    pts = [d2d(0, 0, 0), d2d(1, 0, 2), d2d(0, 1, 4), cu(0.5, 0.5, 6), d2d(40, 40, 7), cu(41, 41, 9)]
    res = kmeans(pts, 2)
    assert res.assignments == (0, 0, 0, 0, 1, 1)
    assert res.objective == pytest.approx(brute_force_optimum(coords(pts), 2), rel=1e-12)


def test_kmeans_six_points_vs_brute_force():
    topo = generate_topology(4, 2, seed=2024)
    res = kmeans(topo.points, 2)
    opt = brute_force_optimum(coords(topo.points), 2)
    assert res.objective >= opt * (1 - 1e-12)


def test_kmeans_ten_pair_shape():
    topo = generate_topology(10, 3, seed=77)
    res = kmeans(topo.points, 3)
    assert len(res.assignments) == 13
    assert set(res.assignments) <= {0, 1, 2}
    assert len(res.centroids) == 3


def test_kmeans_rejects_bad_args():
    topo = generate_topology(3, 2, seed=0)
    with pytest.raises(InsufficientCUError):
        kmeans(topo.points, 3)
    with pytest.raises(ClusteringError):
        kmeans(topo.points, 2, max_iter=0)


def test_kmeans_respects_max_iter():
    topo = generate_topology(30, 4, seed=3)
    assert kmeans(topo.points, 4, max_iter=1).iterations_run == 1


def test_coverage_unchanged_when_satisfied():
    pts = [cu(0, 0, 10), d2d(1, 1), cu(20, 20, 11), d2d(21, 21, 2), cu(40, 0, 12)]
    res = kmeans(pts, 3)
    assert enforce_cu_coverage(res, pts) is res


def test_coverage_repair_all_cus_in_one_shard():
    pts = [cu(0, 0, 10), cu(0.1, 0, 11), cu(0, 0.1, 12), d2d(50, 50, 0), d2d(-50, 50, 2)]
    bad = Clustering(
        centroids=(Centroid(0, 0, 0), Centroid(50, 50, 1), Centroid(-50, 50, 2)),
        assignments=(0, 0, 0, 1, 2),
        iterations_run=1,
        objective=0.0,
    )
    fixed = enforce_cu_coverage(bad, pts)
    cu_shards = sorted(s for p, s in zip(pts, fixed.assignments) if p.node_type == NodeType.CU)
    assert cu_shards == [0, 1, 2]
    assert fixed.assignments[3:] == (1, 2)
    # shard 1 is repaired first and takes the CU nearest (50, 50), i.e. (0.1, 0)
    assert fixed.assignments[1] == 1
    assert fixed.objective == pytest.approx(
        sum(squared_distance(p, fixed.centroids[s]) for p, s in zip(pts, fixed.assignments))
    )


def test_clustering_json_round_trip():
    topo = generate_topology(6, 2, seed=1)
    res = kmeans(topo.points, 2)
    d = res.to_dict(topo.points)
    assert set(d) == {"centroids", "assignments", "iterations_run", "objective"}
    assert set(d["assignments"][0]) == {"node_id_1", "node_id_2", "node_type", "shard"}
    assert Clustering.from_dict(d) == res


instances = st.builds(
    lambda n, k, seed: (generate_topology(n, k, seed=seed), k),
    st.integers(1, 50),
    st.integers(1, 8),
    st.integers(0, 2**64 - 1),
)


@given(instances)
@settings(max_examples=150, deadline=None)
def test_kmeans_properties(inst):
    topo, k = inst
    history = []
    res = kmeans(topo.points, k, tol=0, history=history)
    pts = topo.points
    cxy = [(c.x, c.y) for c in res.centroids]

    if res.iterations_run < 100:
        # converged to a fixed point: assignments are the exact nearest centroids
        assert list(res.assignments) == [nearest_centroid(xy, cxy) for xy in coords(pts)]

    for shard in range(k):
        members = [p for p, a in zip(pts, res.assignments) if a == shard]
        if members:
            mx = sum(p.x for p in members) / len(members)
            my = sum(p.y for p in members) / len(members)
            assert res.centroids[shard].x == pytest.approx(mx, rel=1e-9, abs=1e-9)
            assert res.centroids[shard].y == pytest.approx(my, rel=1e-9, abs=1e-9)

    recomputed = sum(squared_distance(p, res.centroids[a]) for p, a in zip(pts, res.assignments))
    assert res.objective == pytest.approx(recomputed, rel=1e-9)

    for a, b in zip(history, history[1:]):
        assert b <= a * (1 + 1e-9) + 1e-12

    fixed = enforce_cu_coverage(res, pts)
    cu_shards = {s for p, s in zip(pts, fixed.assignments) if p.node_type == NodeType.CU}
    assert cu_shards == set(range(k))
    # pair members share a point, so there is never more than one shard per pair
    assert len(fixed.assignments) == len(pts)


@given(instances, st.floats(0.01, 100))
@settings(max_examples=75, deadline=None)
def test_scale_equivariance(inst, c):
    topo, k = inst
    base = kmeans(topo.points, k, tol=0)
    scaled_pts = [Point(p.x * c, p.y * c, p.node_id_1, p.node_type, p.node_id_2) for p in topo.points]
    scaled = kmeans(scaled_pts, k, tol=0)
    assert scaled.assignments == base.assignments
    assert scaled.objective == pytest.approx(base.objective * c * c, rel=1e-9, abs=1e-9)


def test_determinism():
    topo = generate_topology(20, 4, seed=99)
    assert kmeans(topo.points, 4) == kmeans(topo.points, 4)
