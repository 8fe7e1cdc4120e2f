"""Cluster assignment, curve prediction, deviation monitoring and reassignment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Mapping

from .clustering import ClusterModel
from .context import goodness_of_fit
from .curve_model import CharacteristicCurve, prefix_distance
from .errors import (
    BadTotal,
    Complete,
    EmptyModel,
    InvalidParams,
    MalformedActual,
    NoActuals,
    UnknownCluster,
)

StrategyKind = Literal["distance", "context", "hybrid"]
STRATEGIES: tuple[str, ...] = ("distance", "context", "hybrid")


@dataclass(frozen=True)
class Strategy:
    """How to pick a new cluster once actuals are known.

    ``delta`` is the hybrid slack in percentage points: every cluster whose
    prefix distance is within ``delta`` of the best one competes on
    goodness of fit.
    """

    kind: StrategyKind = "hybrid"
    delta: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in STRATEGIES:
            raise InvalidParams(f"unknown strategy {self.kind!r}; choose from {', '.join(STRATEGIES)}")
        if not self.delta >= 0:
            raise InvalidParams(f"delta must be non-negative, got {self.delta!r}")


@dataclass(frozen=True)
class Prediction:
    cluster_id: int
    percent: tuple[float, ...]
    absolute: tuple[float, ...] | None = None


@dataclass(frozen=True)
class DeviationReport:
    checkpoint: int
    predicted_value: float
    actual_value: float
    delta: float
    flagged: bool
    tolerance: float


@dataclass
class PredictionState:
    project_id: str
    assigned_cluster: int
    predicted: CharacteristicCurve
    baseline_total: float
    actual_prefix: list[float] = field(default_factory=list)
    history: list[tuple[int, int]] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.actual_prefix)

    @property
    def m(self) -> int:
        return len(self.predicted)


def _cluster(model: ClusterModel, cluster_id: int):
    if isinstance(cluster_id, bool) or not 0 <= cluster_id < len(model.clusters):
        raise UnknownCluster(f"no cluster with id {cluster_id!r}")
    return model.clusters[cluster_id]


def goodness_by_cluster(project_context: Mapping[str, str], model: ClusterModel) -> list[float]:
    return [goodness_of_fit(project_context, c.signature) for c in model.clusters]


def assign_by_context(project_context: Mapping[str, str], model: ClusterModel) -> int:
    """Cluster with the highest goodness of fit; ties go to the lower id."""
    if not model.clusters:
        raise EmptyModel("model has no clusters")
    scores = goodness_by_cluster(project_context, model)
    return min(range(len(scores)), key=lambda cid: (-scores[cid], cid))


def predict_curve(model: ClusterModel, cluster_id: int, baseline_total: float | None = None) -> Prediction:
    cluster = _cluster(model, cluster_id)
    absolute = None
    if baseline_total is not None:
        if not baseline_total > 0 or math.isinf(baseline_total):
            raise BadTotal(f"baseline total must be positive, got {baseline_total!r}")
        absolute = tuple(v * baseline_total / 100.0 for v in cluster.curve)
    return Prediction(cluster_id, cluster.curve.values, absolute)


def start(
    project_id: str, project_context: Mapping[str, str], model: ClusterModel, baseline_total: float
) -> PredictionState:
    """Initial state for a project that has not produced actuals yet."""
    if not baseline_total > 0 or math.isinf(baseline_total):
        raise BadTotal(f"baseline total must be positive, got {baseline_total!r}")
    cid = assign_by_context(project_context, model)
    return PredictionState(project_id, cid, model.clusters[cid].curve, float(baseline_total))


def monitor(state: PredictionState, new_actual: float, tolerance: float) -> DeviationReport:
    """Record the actual cumulative percent at the next checkpoint and compare it.

    A deviation is flagged only when it strictly exceeds ``tolerance``.
    """
    if state.k >= state.m:
        raise Complete(f"{state.project_id}: all {state.m} checkpoints already observed")
    if not tolerance > 0:
        raise InvalidParams(f"tolerance must be positive, got {tolerance!r}")
    new_actual = float(new_actual)
    if math.isnan(new_actual) or new_actual < 0:
        raise MalformedActual(f"actual value must be non-negative, got {new_actual!r}")
    if state.actual_prefix and new_actual < state.actual_prefix[-1]:
        raise MalformedActual(
            f"cumulative actual decreased from {state.actual_prefix[-1]} to {new_actual}"
        )
    predicted = state.predicted[state.k]
    state.actual_prefix.append(new_actual)
    delta = new_actual - predicted
    return DeviationReport(state.k, predicted, new_actual, delta, abs(delta) > tolerance, float(tolerance))


def rank_clusters(
    actual_prefix: list[float],
    project_context: Mapping[str, str],
    model: ClusterModel,
    strategy: Strategy,
) -> int:
    k = len(actual_prefix)
    if k == 0:
        raise NoActuals("reassignment needs at least one observed checkpoint")
    if not model.clusters:
        raise EmptyModel("model has no clusters")
    dists = [prefix_distance(actual_prefix, c.curve, k) for c in model.clusters]
    gofs = goodness_by_cluster(project_context, model)
    ids = range(len(model.clusters))
    if strategy.kind == "distance":
        return min(ids, key=lambda c: (dists[c], -gofs[c], c))
    if strategy.kind == "context":
        return min(ids, key=lambda c: (-gofs[c], dists[c], c))
    best = min(dists)
    candidates = [c for c in ids if dists[c] <= best + strategy.delta]
    return min(candidates, key=lambda c: (-gofs[c], dists[c], c))


def reassign(
    state: PredictionState,
    model: ClusterModel,
    project_context: Mapping[str, str],
    strategy: Strategy,
) -> int:
    """Pick a cluster from the observed prefix and context; swap the prediction.

    A switch is appended to ``state.history`` as ``(checkpoint, new cluster)``;
    a second switch at the same checkpoint overwrites the first. Earlier
    checkpoints are not re-evaluated against the new curve.
    """
    cid = rank_clusters(state.actual_prefix, project_context, model, strategy)
    if cid != state.assigned_cluster:
        state.assigned_cluster = cid
        state.predicted = model.clusters[cid].curve
        if state.history and state.history[-1][0] == state.k:
            state.history[-1] = (state.k, cid)
        else:
            state.history.append((state.k, cid))
    return cid
