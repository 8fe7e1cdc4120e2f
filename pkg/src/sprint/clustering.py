"""Agglomerative hierarchical clustering of characteristic curves."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Literal, Mapping, Sequence

import numpy as np

from .context import ContextSignature
from .curve_model import CharacteristicCurve, curve_distance, mean_curve
from .errors import EmptyInput, GranularityMismatch, InvalidParams, InvariantViolation

Linkage = Literal["single", "average", "complete"]
LINKAGES: tuple[str, ...] = ("single", "average", "complete")


@dataclass(frozen=True)
class ClusteringParams:
    linkage: Linkage = "average"
    cut_distance: float | None = None
    target_count: int | None = None

    def __post_init__(self) -> None:
        if self.linkage not in LINKAGES:
            raise InvalidParams(f"unknown linkage {self.linkage!r}; choose from {', '.join(LINKAGES)}")
        if (self.cut_distance is None) == (self.target_count is None):
            raise InvalidParams("set exactly one of cut_distance / target_count")
        if self.cut_distance is not None and not self.cut_distance > 0:
            raise InvalidParams(f"cut_distance must be positive, got {self.cut_distance!r}")
        if self.target_count is not None and (
            isinstance(self.target_count, bool) or int(self.target_count) != self.target_count
            or self.target_count < 1
        ):
            raise InvalidParams(f"target_count must be a positive integer, got {self.target_count!r}")


@dataclass(frozen=True)
class Cluster:
    cluster_id: int
    member_ids: tuple[str, ...]
    curve: CharacteristicCurve
    signature: ContextSignature = field(default_factory=ContextSignature)

    def __post_init__(self) -> None:
        object.__setattr__(self, "member_ids", tuple(sorted(self.member_ids)))
        if not self.member_ids:
            raise EmptyInput("a cluster needs at least one member")


@dataclass(frozen=True)
class Merge:
    left: tuple[str, ...]
    right: tuple[str, ...]
    distance: float


def quantize(x: float) -> float:
    """Round to the 12 significant digits kept in model files."""
    return float(format(float(x), ".12g"))


@dataclass(frozen=True)
class ClusterModel:
    """Everything needed to predict for a new project.

    Numeric fields are rounded to 12 significant digits on construction so
    that a saved and reloaded model compares equal to the original.
    """

    granularity: int
    clusters: tuple[Cluster, ...]
    params: ClusteringParams
    context_threshold: float = 0.0
    db_fingerprint: str = ""
    attributes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        clusters = []
        for c in sorted(self.clusters, key=lambda c: c.cluster_id):
            if len(c.curve) != self.granularity:
                raise GranularityMismatch(
                    f"cluster {c.cluster_id} has {len(c.curve)} checkpoints, model has {self.granularity}"
                )
            curve = CharacteristicCurve(tuple(quantize(v) for v in c.curve))
            sig = ContextSignature(
                {a: {v: quantize(w) for v, w in vals.items()} for a, vals in c.signature.entries.items()},
                quantize(c.signature.threshold),
            )
            clusters.append(replace(c, curve=curve, signature=sig))
        if [c.cluster_id for c in clusters] != list(range(len(clusters))):
            raise InvalidParams("cluster ids must be 0..n-1")
        seen: set[str] = set()
        for c in clusters:
            if seen.intersection(c.member_ids):
                raise InvalidParams("cluster member sets must be disjoint")
            seen.update(c.member_ids)
        object.__setattr__(self, "clusters", tuple(clusters))
        object.__setattr__(self, "context_threshold", quantize(self.context_threshold))
        object.__setattr__(self, "attributes", tuple(sorted(self.attributes)))
        if self.params.cut_distance is not None:
            object.__setattr__(
                self, "params", replace(self.params, cut_distance=quantize(self.params.cut_distance))
            )

    def __len__(self) -> int:
        return len(self.clusters)

    def member_ids(self) -> set[str]:
        return {pid for c in self.clusters for pid in c.member_ids}


def linkage_distance(
    a: Sequence[Sequence[float]], b: Sequence[Sequence[float]], linkage: Linkage = "average"
) -> float:
    """Linkage distance between two groups of curves."""
    if not a or not b:
        raise EmptyInput("linkage_distance needs two nonempty groups")
    pairs = [curve_distance(x, y) for x, y in product(a, b)]
    if linkage == "single":
        return min(pairs)
    if linkage == "complete":
        return max(pairs)
    if linkage == "average":
        return math.fsum(pairs) / len(pairs)
    raise InvalidParams(f"unknown linkage {linkage!r}")


def _check_curves(curves: Mapping[str, CharacteristicCurve]) -> list[str]:
    if not curves:
        raise EmptyInput("nothing to cluster")
    ids = sorted(curves)
    m = len(curves[ids[0]])
    for pid in ids:
        if len(curves[pid]) != m:
            raise GranularityMismatch(f"{pid}: {len(curves[pid])} checkpoints, expected {m}")
    return ids


def agglomerate(
    curves: Mapping[str, CharacteristicCurve], params: ClusteringParams
) -> tuple[list[list[str]], list[Merge]]:
    """Run the merge loop; return the final groups and the merge sequence.

    Groups are kept in slots ordered by their smallest member id. A merged
    group takes the lower slot, so the first minimum in row-major order of
    the distance matrix is always the lexicographically least
    ``(smaller id, larger id)`` pair among tied candidates.
    """
    ids = _check_curves(curves)
    n = len(ids)
    if params.target_count is not None and params.target_count > n:
        raise InvalidParams(f"target_count {params.target_count} exceeds {n} projects")

    x = np.array([curves[pid].values for pid in ids], dtype=float)
    diff = x[:, None, :] - x[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(dist, np.inf)

    groups: list[list[str] | None] = [[pid] for pid in ids]
    sizes = np.ones(n)
    active = n
    merges: list[Merge] = []
    target = params.target_count if params.target_count is not None else 1

    while active > target:
        flat = int(np.argmin(dist))
        i, j = divmod(flat, n)
        d = float(dist[i, j])
        if params.cut_distance is not None and d > params.cut_distance:
            break
        if i > j:
            i, j = j, i
        merges.append(Merge(tuple(groups[i]), tuple(groups[j]), d))

        if params.linkage == "single":
            row = np.minimum(dist[i], dist[j])
        elif params.linkage == "complete":
            row = np.maximum(dist[i], dist[j])
        else:
            row = (sizes[i] * dist[i] + sizes[j] * dist[j]) / (sizes[i] + sizes[j])
        dist[i, :] = row
        dist[:, i] = row
        dist[i, i] = np.inf
        dist[j, :] = np.inf
        dist[:, j] = np.inf
        groups[i] = sorted(groups[i] + groups[j])
        groups[j] = None
        sizes[i] += sizes[j]
        active -= 1

    return [g for g in groups if g is not None], merges


def build_clusters(
    curves: Mapping[str, CharacteristicCurve], params: ClusteringParams
) -> list[Cluster]:
    """Cluster the curves and attach each cluster's mean curve.

    Cluster ids are dense from 0, ordered by smallest member project id.
    """
    groups, _ = agglomerate(curves, params)
    clusters = [
        Cluster(cid, tuple(g), mean_curve(curves[pid] for pid in g)) for cid, g in enumerate(groups)
    ]
    clustered = [pid for c in clusters for pid in c.member_ids]
    if sorted(clustered) != sorted(curves):
        raise InvariantViolation("clusters do not partition the input projects")
    return clusters


def merge_history(curves: Mapping[str, CharacteristicCurve], params: ClusteringParams) -> list[Merge]:
    return agglomerate(curves, params)[1]
