"""Project databases in, cluster models in and out.

Database document::

    {"projects": [{"id": "p1", "planned_duration": 12, "baseline_total": 800,
                   "context": {"domain": "B", "complexity": "D"},
                   "series": {"mode": "cumulative", "points": [[3, 120], [6, 400], [12, 800]]}}]}

Timestamps are in the project's own time unit and are divided by
``planned_duration`` on load. Model files are canonical JSON: sorted keys,
numbers rounded to 12 significant digits, clusters ordered by id and
signature entries by attribute then value.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from .clustering import Cluster, ClusteringParams, ClusterModel
from .context import MISSING, ContextSignature, fill_missing
from .curve_model import CharacteristicCurve, MeasurementSeries
from .errors import (
    BadDuration,
    BadTotal,
    DuplicateProject,
    GranularityMismatch,
    InvalidCurve,
    InvalidParams,
    MalformedSeries,
    ParseError,
    UnsupportedVersion,
)

MODEL_FORMAT = "sprint-cluster-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class ProjectRecord:
    project_id: str
    context: Mapping[str, str]
    series: MeasurementSeries
    planned_duration: float = 1.0
    baseline_total: float | None = None

    def canonical(self) -> dict[str, Any]:
        return {
            "id": self.project_id,
            "planned_duration": self.planned_duration,
            "baseline_total": self.baseline_total,
            "context": dict(sorted(self.context.items())),
            "series": {"mode": self.series.mode, "points": [list(p) for p in self.series.points]},
        }


@dataclass(frozen=True)
class ProjectDatabase:
    records: tuple[ProjectRecord, ...]
    attribute_catalog: frozenset[str] = field(default=frozenset())

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for r in self.records:
            if r.project_id in seen:
                raise DuplicateProject(r.project_id)
            seen.add(r.project_id)
        catalog = frozenset(a for r in self.records for a in r.context)
        object.__setattr__(self, "attribute_catalog", catalog)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def ids(self) -> list[str]:
        return [r.project_id for r in self.records]

    def get(self, project_id: str) -> ProjectRecord:
        for r in self.records:
            if r.project_id == project_id:
                return r
        raise KeyError(project_id)

    def without(self, project_id: str) -> "ProjectDatabase":
        return ProjectDatabase(tuple(r for r in self.records if r.project_id != project_id))

    def contexts(self) -> dict[str, dict[str, str]]:
        return {r.project_id: dict(r.context) for r in self.records}

    def fingerprint(self) -> str:
        return database_fingerprint(self)


def database_fingerprint(db: ProjectDatabase) -> str:
    """SHA-256 over the canonical JSON form of the database."""
    doc = {"projects": [r.canonical() for r in sorted(db.records, key=lambda r: r.project_id)]}
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _number(value: Any, what: str, index: int) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ParseError(f"{what} must be a finite number, got {value!r}", record=index)
    return float(value)


def _context(raw: Any, index: int) -> dict[str, str]:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ParseError("context must be an object", record=index)
    ctx = {}
    for k, v in raw.items():
        if not str(k):
            raise ParseError("context attribute names must be nonempty", record=index)
        if v is None:
            continue
        if str(v) == MISSING:
            raise ParseError(f"the value {MISSING!r} is reserved", record=index)
        ctx[str(k)] = str(v)
    return ctx


@dataclass(frozen=True)
class RawProject:
    project_id: str
    context: dict[str, str]
    points: tuple[tuple[float, float], ...]
    mode: str
    planned_duration: float
    baseline_total: float | None


def _parse_project(item: Any, index: int) -> RawProject:
    if not isinstance(item, dict):
        raise ParseError("project entry must be an object", record=index)
    if "id" not in item:
        raise ParseError("project is missing 'id'", record=index)
    pid = str(item["id"])
    duration = _number(item.get("planned_duration", 1.0), "planned_duration", index)
    if duration <= 0:
        raise BadDuration(f"{pid}: planned_duration must be positive, got {duration}")
    total = item.get("baseline_total")
    if total is not None:
        total = _number(total, "baseline_total", index)
        if total <= 0:
            raise BadTotal(f"{pid}: baseline_total must be positive, got {total}")
    series = item.get("series")
    if not isinstance(series, dict) or not isinstance(series.get("points"), list):
        raise ParseError(f"{pid}: series must be an object with a 'points' list", record=index)
    mode = series.get("mode", "cumulative")
    if mode not in ("incremental", "cumulative"):
        raise ParseError(f"{pid}: unknown series mode {mode!r}", record=index)
    points = []
    for p in series["points"]:
        if not isinstance(p, (list, tuple)) or len(p) != 2:
            raise ParseError(f"{pid}: each point must be [time, value]", record=index)
        t = _number(p[0], "time", index)
        v = _number(p[1], "value", index)
        points.append((t / duration, v))
    return RawProject(pid, _context(item.get("context"), index), tuple(points), mode, duration, total)


def _read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", line=exc.lineno) from exc


def database_from_raw(raws: Iterable[RawProject]) -> ProjectDatabase:
    raws = list(raws)
    seen: set[str] = set()
    for r in raws:
        if r.project_id in seen:
            raise DuplicateProject(r.project_id)
        seen.add(r.project_id)
    catalog = sorted({a for r in raws for a in r.context})
    records = []
    for r in raws:
        series = MeasurementSeries(r.project_id, r.points, r.mode)
        records.append(
            ProjectRecord(r.project_id, fill_missing(r.context, catalog), series, r.planned_duration, r.baseline_total)
        )
    return ProjectDatabase(tuple(records))


def parse_database(doc: Any) -> ProjectDatabase:
    if not isinstance(doc, dict) or not isinstance(doc.get("projects"), list):
        raise ParseError("database must be an object with a 'projects' list")
    return database_from_raw(_parse_project(item, i) for i, item in enumerate(doc["projects"]))


def load_database(path: str | Path) -> ProjectDatabase:
    """Load and validate a database; ``.csv`` paths go through :func:`load_csv`."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return load_csv(path, path.with_name(path.stem + ".context.csv"))
    return parse_database(_read_json(path))


def load_csv(
    points_path: str | Path,
    context_path: str | Path | None = None,
    mode: str = "cumulative",
) -> ProjectDatabase:
    """Import spreadsheet data.

    ``points_path`` has columns ``project_id,time,value`` (optionally
    ``planned_duration``); rows of one project must be in time order. The
    sidecar ``context_path`` has columns ``project_id,attribute,value``.
    """
    points: dict[str, list[tuple[float, float]]] = {}
    durations: dict[str, float] = {}
    try:
        with open(points_path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = {"project_id", "time", "value"} - set(reader.fieldnames or ())
            if missing:
                raise ParseError(f"{points_path}: missing columns {sorted(missing)}", line=1)
            for row in reader:
                pid = row["project_id"]
                try:
                    t, v = float(row["time"]), float(row["value"])
                    if row.get("planned_duration"):
                        durations[pid] = float(row["planned_duration"])
                except ValueError as exc:
                    raise ParseError(f"{points_path}: {exc}", line=reader.line_num) from exc
                points.setdefault(pid, []).append((t, v))
        contexts: dict[str, dict[str, str]] = {pid: {} for pid in points}
        if context_path is not None and Path(context_path).exists():
            with open(context_path, newline="", encoding="utf-8") as fh:
                reader = csv.DictReader(fh)
                missing = {"project_id", "attribute", "value"} - set(reader.fieldnames or ())
                if missing:
                    raise ParseError(f"{context_path}: missing columns {sorted(missing)}", line=1)
                for row in reader:
                    if row["value"] == MISSING:
                        raise ParseError(f"the value {MISSING!r} is reserved", line=reader.line_num)
                    contexts.setdefault(row["project_id"], {})[row["attribute"]] = row["value"]
    except OSError as exc:
        raise ParseError(f"cannot read csv input: {exc.strerror}") from exc

    raws = []
    for i, (pid, pts) in enumerate(points.items()):
        duration = durations.get(pid, 1.0)
        if duration <= 0:
            raise BadDuration(f"{pid}: planned_duration must be positive, got {duration}")
        raws.append(
            RawProject(pid, contexts.get(pid, {}), tuple((t / duration, v) for t, v in pts), mode, duration, None)
        )
    return database_from_raw(raws)


def load_project(path: str | Path) -> RawProject:
    """Load one in-flight project (a single project object, or a one-entry database)."""
    doc = _read_json(path)
    if isinstance(doc, dict) and isinstance(doc.get("projects"), list):
        if len(doc["projects"]) != 1:
            raise ParseError(f"{path}: expected exactly one project")
        doc = doc["projects"][0]
    return _parse_project(doc, 0)


def model_to_dict(model: ClusterModel) -> dict[str, Any]:
    return {
        "format": MODEL_FORMAT,
        "format_version": MODEL_VERSION,
        "granularity": model.granularity,
        "params": {
            "linkage": model.params.linkage,
            "cut_distance": model.params.cut_distance,
            "target_count": model.params.target_count,
        },
        "context_threshold": model.context_threshold,
        "db_fingerprint": model.db_fingerprint,
        "attributes": sorted(model.attributes),
        "clusters": [
            {
                "id": c.cluster_id,
                "members": sorted(c.member_ids),
                "curve": list(c.curve.values),
                "signature": {
                    "threshold": c.signature.threshold,
                    "entries": [[a, v, w] for a, v, w in c.signature.items()],
                },
            }
            for c in sorted(model.clusters, key=lambda c: c.cluster_id)
        ],
    }


def dumps_model(model: ClusterModel) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def save_model(model: ClusterModel, path: str | Path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def model_from_dict(doc: Any) -> ClusterModel:
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ParseError("not a cluster model file")
    version = doc.get("format_version")
    if version != MODEL_VERSION:
        raise UnsupportedVersion(f"model format version {version!r} is not supported (expected {MODEL_VERSION})")
    if not isinstance(doc.get("db_fingerprint"), str) or not doc["db_fingerprint"]:
        raise ParseError("model file has no db_fingerprint")
    try:
        p = doc["params"]
        params = ClusteringParams(p["linkage"], p.get("cut_distance"), p.get("target_count"))
        clusters = []
        for i, c in enumerate(doc["clusters"]):
            sig: dict[str, dict[str, float]] = {}
            for a, v, w in c["signature"]["entries"]:
                sig.setdefault(a, {})[v] = float(w)
            clusters.append(
                Cluster(
                    int(c["id"]),
                    tuple(c["members"]),
                    CharacteristicCurve(tuple(c["curve"])),
                    ContextSignature(sig, float(c["signature"]["threshold"])),
                )
            )
        return ClusterModel(
            int(doc["granularity"]),
            tuple(clusters),
            params,
            float(doc["context_threshold"]),
            doc["db_fingerprint"],
            tuple(doc.get("attributes", ())),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed model file: {exc!r}") from exc
    except (GranularityMismatch, InvalidCurve, InvalidParams, MalformedSeries) as exc:
        raise ParseError(f"invalid model content: {exc}") from exc


def load_model(path: str | Path) -> ClusterModel:
    return model_from_dict(_read_json(path))

