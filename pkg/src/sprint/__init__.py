"""Cluster-curve estimation of software project attribute distributions.

Historical projects are turned into characteristic curves, grouped by shape,
and each group is characterized by the nominal context values that are typical
for it. New projects are matched to a group by context, and matched again
during execution once their own actuals are known.
"""

from .clustering import Cluster, ClusteringParams, ClusterModel, build_clusters, linkage_distance
from .context import ContextSignature, build_signature, goodness_of_fit, value_weight
from .curve_model import CharacteristicCurve, MeasurementSeries, curve_distance, mean_curve, normalize_series, prefix_distance
from .pipeline import build_model
from .prediction import PredictionState, Strategy, assign_by_context, monitor, predict_curve, reassign
from .store import load_database, load_model, save_model

__version__ = "0.1.0"
