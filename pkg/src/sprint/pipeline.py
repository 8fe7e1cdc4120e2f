from __future__ import annotations

from typing import Mapping

from .clustering import Cluster, ClusteringParams, ClusterModel, build_clusters
from .context import build_signature
from .curve_model import DEFAULT_GRANULARITY, CharacteristicCurve, check_granularity, normalize_series
from .errors import EmptyInput
from .store import ProjectDatabase


def characteristic_curves(db: ProjectDatabase, m: int = DEFAULT_GRANULARITY) -> dict[str, CharacteristicCurve]:
    m = check_granularity(m)
    return {r.project_id: normalize_series(r.series, m) for r in db.records}


def model_from_curves(
    curves: Mapping[str, CharacteristicCurve],
    contexts: Mapping[str, Mapping[str, str]],
    params: ClusteringParams,
    threshold: float = 0.0,
    fingerprint: str = "",
) -> ClusterModel:
    """Cluster ``curves`` and characterize each cluster by its members' contexts."""
    if not curves:
        raise EmptyInput("database has no projects")
    m = len(next(iter(curves.values())))
    database = [contexts[pid] for pid in sorted(curves)]
    clusters = []
    for c in build_clusters(curves, params):
        members = [contexts[pid] for pid in c.member_ids]
        clusters.append(Cluster(c.cluster_id, c.member_ids, c.curve, build_signature(members, database, threshold)))
    attributes = sorted({a for ctx in database for a in ctx})
    return ClusterModel(m, tuple(clusters), params, threshold, fingerprint, tuple(attributes))


def build_model(
    db: ProjectDatabase,
    params: ClusteringParams,
    m: int = DEFAULT_GRANULARITY,
    threshold: float = 0.0,
) -> ClusterModel:
    """Normalize, cluster and characterize a whole project database."""
    if not len(db):
        raise EmptyInput("database has no projects")
    curves = characteristic_curves(db, m)
    return model_from_curves(curves, db.contexts(), params, threshold, db.fingerprint())
