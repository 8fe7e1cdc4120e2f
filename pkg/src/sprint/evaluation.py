"""Leave-one-out evaluation of cluster-curve prediction.

Each project is held out in turn, a model is built on the rest, the held-out
project is assigned by its context, optionally reassigned after observing
the first ``observe`` checkpoints of its true curve, and the final cluster
curve is scored against the true curve. The global mean curve of the same
fold serves as the baseline predictor.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

from .clustering import ClusteringParams, ClusterModel
from .context import goodness_of_fit
from .curve_model import CharacteristicCurve, curve_distance, mean_curve
from .errors import InvalidParams, InvariantViolation
from .pipeline import characteristic_curves, model_from_curves
from .prediction import STRATEGIES, Strategy, assign_by_context, rank_clusters
from .store import ProjectDatabase

MIN_PROJECTS = 3


def mae(predicted: Sequence[float], actual: Sequence[float]) -> float:
    return math.fsum(abs(p - a) for p, a in zip(predicted, actual)) / len(actual)


def rmse(predicted: Sequence[float], actual: Sequence[float]) -> float:
    return curve_distance(predicted, actual) / math.sqrt(len(actual))


@dataclass(frozen=True)
class EvaluationRow:
    project_id: str
    initial_cluster: int
    assigned_cluster: int
    best_cluster: int
    goodness_of_fit: float
    mae: float
    rmse: float
    baseline_mae: float
    predicted: tuple[float, ...]

    @property
    def correct(self) -> bool:
        return self.assigned_cluster == self.best_cluster


@dataclass
class EvaluationReport:
    strategy: str
    delta: float
    observe: int
    granularity: int
    rows: list[EvaluationRow]
    comparison: dict[str, dict[str, float]] = field(default_factory=dict)

    @property
    def aggregates(self) -> dict[str, float]:
        return summarize(self.rows)

    def to_dict(self) -> dict[str, Any]:
        return {
            "strategy": self.strategy,
            "delta": self.delta,
            "observe": self.observe,
            "granularity": self.granularity,
            "aggregates": self.aggregates,
            "comparison": self.comparison,
            "projects": [dict(asdict(r), correct=r.correct) for r in self.rows],
        }


def summarize(rows: Sequence[EvaluationRow]) -> dict[str, float]:
    maes = [r.mae for r in rows]
    base = [r.baseline_mae for r in rows]
    return {
        "projects": len(rows),
        "mean_mae": math.fsum(maes) / len(maes),
        "median_mae": statistics.median(maes),
        "mean_rmse": math.fsum(r.rmse for r in rows) / len(rows),
        "baseline_mean_mae": math.fsum(base) / len(base),
        "baseline_median_mae": statistics.median(base),
        "assignment_accuracy": sum(r.correct for r in rows) / len(rows),
    }


@dataclass(frozen=True)
class _Fold:
    project_id: str
    model: ClusterModel
    baseline: CharacteristicCurve


def _folds(
    db: ProjectDatabase, params: ClusteringParams, m: int, threshold: float
) -> tuple[dict[str, CharacteristicCurve], list[_Fold]]:
    curves = characteristic_curves(db, m)
    contexts = db.contexts()
    folds = []
    for pid in sorted(curves):
        fold_db = db.without(pid)
        fold_curves = {q: c for q, c in curves.items() if q != pid}
        model = model_from_curves(fold_curves, contexts, params, threshold, fold_db.fingerprint())
        if pid in model.member_ids() or model.db_fingerprint == db.fingerprint():
            raise InvariantViolation(f"held-out project {pid} leaked into its training fold")
        folds.append(_Fold(pid, model, mean_curve(fold_curves[q] for q in sorted(fold_curves))))
    return curves, folds


def _score(
    curves: dict[str, CharacteristicCurve],
    contexts: dict[str, dict[str, str]],
    folds: list[_Fold],
    strategy: Strategy,
    observe: int,
) -> list[EvaluationRow]:
    rows = []
    for fold in folds:
        truth = curves[fold.project_id]
        ctx = contexts[fold.project_id]
        model = fold.model
        initial = assign_by_context(ctx, model)
        cid = initial
        if observe > 0:
            cid = rank_clusters(list(truth.values[:observe]), ctx, model, strategy)
        predicted = model.clusters[cid].curve
        best = min(range(len(model)), key=lambda c: (curve_distance(truth, model.clusters[c].curve), c))
        rows.append(
            EvaluationRow(
                project_id=fold.project_id,
                initial_cluster=initial,
                assigned_cluster=cid,
                best_cluster=best,
                goodness_of_fit=goodness_of_fit(ctx, model.clusters[cid].signature),
                mae=mae(predicted, truth),
                rmse=rmse(predicted, truth),
                baseline_mae=mae(fold.baseline, truth),
                predicted=predicted.values,
            )
        )
    return rows


def evaluate(
    db: ProjectDatabase,
    params: ClusteringParams,
    m: int,
    strategy: Strategy,
    threshold: float = 0.0,
    observe: int | None = None,
    compare: bool = False,
) -> EvaluationReport:
    """Leave-one-out evaluation.

    ``observe`` is the number of true checkpoints revealed before the
    strategy reassigns; it defaults to ``m // 2``. With ``observe=0`` every
    strategy reduces to pure context assignment. ``compare`` adds aggregate
    rows for all three strategies (same ``delta``).
    """
    if len(db) < MIN_PROJECTS:
        raise InvalidParams(f"leave-one-out evaluation needs at least {MIN_PROJECTS} projects, got {len(db)}")
    if observe is None:
        observe = m // 2
    if not 0 <= observe <= m:
        raise InvalidParams(f"observe must be within 0..{m}, got {observe}")
    curves, folds = _folds(db, params, m, threshold)
    contexts = db.contexts()
    rows = _score(curves, contexts, folds, strategy, observe)
    comparison = {}
    if compare:
        for kind in STRATEGIES:
            other = Strategy(kind, strategy.delta)
            comparison[kind] = summarize(rows if other == strategy else _score(curves, contexts, folds, other, observe))
    return EvaluationReport(strategy.kind, strategy.delta, observe, m, rows, comparison)
