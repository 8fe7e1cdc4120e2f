import random

import pytest
from hypothesis import strategies as st

from sprint.clustering import Cluster, ClusteringParams, ClusterModel
from sprint.context import ContextSignature
from sprint.curve_model import CharacteristicCurve, MeasurementSeries


def random_curve(rng: random.Random, m: int) -> CharacteristicCurve:
    steps = [rng.random() for _ in range(m)]
    total = sum(steps)
    acc, values = 0.0, []
    for s in steps:
        acc += s
        values.append(min(100.0, acc / total * 100.0))
    values[-1] = 100.0
    return CharacteristicCurve(tuple(values))


def random_series(rng: random.Random, pid: str = "p") -> MeasurementSeries:
    n = rng.randint(2, 25)
    times = sorted(rng.sample(range(0, 10_001), n))
    mode = rng.choice(["incremental", "cumulative"])
    values = [rng.uniform(0, 50) for _ in range(n)]
    values[-1] += 1.0
    if mode == "cumulative":
        acc, cum = 0.0, []
        for v in values:
            acc += v
            cum.append(acc)
        values = cum
    return MeasurementSeries(pid, tuple(zip((t / 10_000 for t in times), values)), mode)


def random_model(rng: random.Random, n_clusters: int | None = None, m: int | None = None) -> ClusterModel:
    m = m or rng.randint(2, 12)
    k = n_clusters or rng.randint(1, 5)
    attrs = ["domain", "complexity", "tool"]
    clusters = []
    for cid in range(k):
        entries = {a: {v: rng.uniform(-1, 1) for v in rng.sample("ABCDE", rng.randint(0, 3))} for a in attrs}
        clusters.append(
            Cluster(cid, tuple(f"p{cid}-{j}" for j in range(rng.randint(1, 4))), random_curve(rng, m),
                    ContextSignature(entries, -1.0))
        )
    params = rng.choice([ClusteringParams("average", target_count=k), ClusteringParams("single", cut_distance=12.5)])
    return ClusterModel(m, tuple(clusters), params, -1.0, f"{rng.getrandbits(64):016x}", tuple(attrs))


def random_context(rng: random.Random) -> dict[str, str]:
    return {a: rng.choice("ABCDE") for a in ["domain", "complexity", "tool"]}


@pytest.fixture
def fig1_signature():
    return ContextSignature({"domain": {"B": 0.97}, "complexity": {"D": 0.27, "E": 0.95}}, 0.0)


@st.composite
def curves(draw, m=None):
    m = m if m is not None else draw(st.integers(2, 12))
    steps = draw(st.lists(st.floats(0.0, 1.0), min_size=m, max_size=m))
    steps[-1] += 1e-3
    total = sum(steps)
    acc, values = 0.0, []
    for s in steps:
        acc += s
        values.append(min(100.0, acc / total * 100.0))
    values[-1] = 100.0
    return CharacteristicCurve(tuple(values))
