import math
import random

import pytest

from sprint.clustering import (
    LINKAGES,
    ClusteringParams,
    build_clusters,
    linkage_distance,
    merge_history,
)
from sprint.curve_model import CharacteristicCurve, curve_distance, mean_curve
from sprint.errors import EmptyInput, GranularityMismatch, InvalidParams

from conftest import random_curve
from naive_hac import naive_partition


def random_curves(rng, n, m):
    return {f"p{rng.randrange(10**6):06d}-{i}": random_curve(rng, m) for i in range(n)}


def partition(clusters):
    return {frozenset(c.member_ids) for c in clusters}


class TestParams:
    @pytest.mark.parametrize(
        "kwargs",
        [{}, {"cut_distance": 1.0, "target_count": 2}, {"cut_distance": 0.0}, {"target_count": 0}, {"linkage": "ward", "target_count": 1}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidParams):
            ClusteringParams(**kwargs)

    def test_target_exceeds_projects(self):
        with pytest.raises(InvalidParams):
            build_clusters({"a": CharacteristicCurve((50, 100))}, ClusteringParams(target_count=2))


class TestLinkage:
    def test_singletons(self):
        a, b = CharacteristicCurve((20, 50, 100)), CharacteristicCurve((30, 60, 100))
        for kind in LINKAGES:
            assert linkage_distance([a], [b], kind) == curve_distance(a, b)

    def test_average_arithmetic(self):
        # distances 3 and 5 from c
        c, c1, c2 = (0.0, 100.0), (3.0, 100.0), (5.0, 100.0)
        assert linkage_distance([c], [c1, c2], "average") == 4.0
        assert linkage_distance([c], [c1, c2], "single") == 3.0
        assert linkage_distance([c], [c1, c2], "complete") == 5.0

    def test_empty(self):
        with pytest.raises(EmptyInput):
            linkage_distance([], [CharacteristicCurve((50, 100))])

    @pytest.mark.parametrize("seed", range(30))
    def test_ordering_against_enumeration(self, seed):
        rng = random.Random(seed)
        a = [random_curve(rng, 5) for _ in range(rng.randint(1, 4))]
        b = [random_curve(rng, 5) for _ in range(rng.randint(1, 4))]
        pairs = [math.dist(x, y) for x in a for y in b]
        s, av, co = (linkage_distance(a, b, k) for k in ("single", "average", "complete"))
        assert s == pytest.approx(min(pairs))
        assert co == pytest.approx(max(pairs))
        assert av == pytest.approx(sum(pairs) / len(pairs))
        assert s <= av <= co


class TestBuildClusters:
    def test_single_curve(self):
        c = CharacteristicCurve((20, 50, 100))
        (cl,) = build_clusters({"a": c}, ClusteringParams(cut_distance=1.0))
        assert cl.cluster_id == 0 and cl.member_ids == ("a",) and cl.curve == c

    def test_identical_curves_merge(self):
        c = CharacteristicCurve((20, 50, 100))
        (cl,) = build_clusters({"a": c, "b": c}, ClusteringParams(cut_distance=1e-9))
        assert cl.member_ids == ("a", "b")

    def test_empty(self):
        with pytest.raises(EmptyInput):
            build_clusters({}, ClusteringParams(cut_distance=1.0))

    def test_mismatch(self):
        with pytest.raises(GranularityMismatch):
            build_clusters(
                {"a": CharacteristicCurve((50, 100)), "b": CharacteristicCurve((20, 50, 100))},
                ClusteringParams(cut_distance=1.0),
            )

    def test_six_curves_two_clusters_matches_reference(self):
        rng = random.Random(6)
        curves = random_curves(rng, 6, 8)
        got = build_clusters(curves, ClusteringParams("average", target_count=2))
        expected, _ = naive_partition(curves, "average", target=2)
        assert len(got) == 2
        assert partition(got) == expected

    def test_ids_follow_smallest_member(self):
        early = CharacteristicCurve((10, 20, 100))
        late = CharacteristicCurve((80, 90, 100))
        curves = {"z": early, "b": late, "a": late, "y": early}
        clusters = build_clusters(curves, ClusteringParams(target_count=2))
        assert [c.member_ids for c in clusters] == [("a", "b"), ("y", "z")]

    def test_tie_break_least_id_pair(self):
        # a-b and c-d are both at distance 10; a-b merges first
        curves = {
            "a": CharacteristicCurve((0, 100)),
            "b": CharacteristicCurve((10, 100)),
            "c": CharacteristicCurve((50, 100)),
            "d": CharacteristicCurve((60, 100)),
        }
        merges = merge_history(curves, ClusteringParams("single", target_count=3))
        assert merges[0].left == ("a",) and merges[0].right == ("b",)
        clusters = build_clusters(curves, ClusteringParams("single", target_count=3))
        assert partition(clusters) == {frozenset("ab"), frozenset("c"), frozenset("d")}

    @pytest.mark.parametrize("linkage", LINKAGES)
    @pytest.mark.parametrize("seed", range(15))
    def test_invariants(self, linkage, seed):
        rng = random.Random(seed)
        curves = random_curves(rng, rng.randint(1, 12), rng.randint(2, 10))
        params = ClusteringParams(linkage, cut_distance=rng.uniform(5, 60))
        clusters = build_clusters(curves, params)
        members = [pid for c in clusters for pid in c.member_ids]
        assert sorted(members) == sorted(curves)
        assert [c.cluster_id for c in clusters] == list(range(len(clusters)))
        for c in clusters:
            oracle = mean_curve(curves[p] for p in c.member_ids)
            assert max(abs(x - y) for x, y in zip(c.curve, oracle)) <= 1e-12
        dists = [mg.distance for mg in merge_history(curves, params)]
        assert all(b >= a - 1e-9 for a, b in zip(dists, dists[1:]))
        assert all(d <= params.cut_distance for d in dists)
        assert build_clusters(dict(reversed(list(curves.items()))), params) == clusters

    @pytest.mark.parametrize("linkage", LINKAGES)
    @pytest.mark.parametrize("seed", range(10))
    def test_cut_matches_reference(self, linkage, seed):
        rng = random.Random(1000 + seed)
        curves = random_curves(rng, rng.randint(2, 8), 6)
        cut = rng.uniform(10, 50)
        got = build_clusters(curves, ClusteringParams(linkage, cut_distance=cut))
        expected, _ = naive_partition(curves, linkage, cut=cut)
        assert partition(got) == expected
