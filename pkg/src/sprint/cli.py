"""``sprint`` command line: build, predict, monitor, evaluate.

Exit codes: 0 success, 2 input error, 3 internal invariant violation.
Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from .clustering import LINKAGES, ClusteringParams, ClusterModel
from .context import MISSING, fill_missing
from .curve_model import DEFAULT_GRANULARITY, observed_percentages
from .errors import InvariantViolation, ParseError, SprintError
from .evaluation import evaluate
from .pipeline import build_model
from .prediction import STRATEGIES, Strategy, assign_by_context, goodness_by_cluster, monitor, predict_curve, reassign, start
from .store import load_database, load_model, load_project, save_model

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _granularity(text: str) -> int:
    try:
        m = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if m < 2:
        raise argparse.ArgumentTypeError(f"granularity must be >= 2, got {m}")
    return m


def _positive(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not x > 0 or math.isinf(x):
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return x


def _non_negative(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not x >= 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return x


def _count(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def parse_context(text: str) -> dict[str, str]:
    """Parse ``k=v,k=v``; an empty string means no context."""
    ctx: dict[str, str] = {}
    if not text.strip():
        return ctx
    for pair in text.split(","):
        key, sep, value = pair.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ParseError(f"malformed context pair {pair!r}; expected key=value")
        if value == MISSING:
            raise ParseError(f"the value {MISSING!r} is reserved")
        ctx[key] = value
    return ctx


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def _check_fingerprint(model: ClusterModel, db_path: str | None) -> None:
    if db_path is None:
        return
    if load_database(db_path).fingerprint() != model.db_fingerprint:
        print(f"warning: model was not built from {db_path} (fingerprint mismatch)", file=sys.stderr)


def _params(args: argparse.Namespace) -> ClusteringParams:
    return ClusteringParams(args.linkage, args.cut, args.clusters)


def cmd_build(args: argparse.Namespace) -> int:
    db = load_database(args.db)
    model = build_model(db, _params(args), args.granularity, args.threshold)
    if sorted(model.member_ids()) != sorted(db.ids):
        raise InvariantViolation("model clusters do not cover the database")
    save_model(model, args.out)
    print(f"projects: {len(db)}  clusters: {len(model)}  granularity: {model.granularity}")
    print(f"fingerprint: {model.db_fingerprint}")
    for c in model.clusters:
        top = ", ".join(f"{a}={v} ({w:+.3f})" for a, v, w in c.signature.top(3)) or "-"
        print(f"cluster {c.cluster_id}: size {len(c.member_ids)}; typical: {top}")
    print(f"model written to {args.out}")
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    _check_fingerprint(model, args.db)
    ctx = fill_missing(parse_context(args.context), model.attributes)
    cid = assign_by_context(ctx, model)
    gof = goodness_by_cluster(ctx, model)[cid]
    pred = predict_curve(model, cid, args.total)
    if args.format == "json":
        doc = {"cluster_id": cid, "goodness_of_fit": gof, "percent": list(pred.percent)}
        if pred.absolute is not None:
            doc["absolute"] = list(pred.absolute)
        print(json.dumps(doc, sort_keys=True))
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["checkpoint", "percent"] + (["absolute"] if pred.absolute is not None else [])
        w.writerow(header)
        for i, p in enumerate(pred.percent):
            row = [i + 1, repr(p)] + ([repr(pred.absolute[i])] if pred.absolute is not None else [])
            w.writerow(row)
        sys.stdout.write(buf.getvalue())
    else:
        print(f"cluster: {cid}")
        print(f"goodness of fit: {gof:.12g}")
        print("percent: " + ",".join(f"{v:.12g}" for v in pred.percent))
        if pred.absolute is not None:
            print("absolute: " + ",".join(f"{v:.12g}" for v in pred.absolute))
    return EXIT_OK


def cmd_monitor(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    _check_fingerprint(model, args.db)
    project = load_project(args.project)
    if project.baseline_total is None:
        raise ParseError(f"{args.project}: project has no baseline_total")
    ctx = fill_missing(project.context, model.attributes)
    strategy = Strategy(args.strategy, args.delta)
    actuals = observed_percentages(project.points, project.baseline_total, model.granularity, project.mode)
    state = start(project.project_id, ctx, model, project.baseline_total)

    rows = []
    print(f"project {project.project_id}: initial cluster {state.assigned_cluster}")
    print("checkpoint  cluster  predicted    actual     delta  flagged")
    for actual in actuals:
        cluster = state.assigned_cluster
        report = monitor(state, actual, args.tolerance)
        switched = None
        if report.flagged:
            new = reassign(state, model, ctx, strategy)
            if new != cluster:
                switched = new
        rows.append((report, cluster, switched))
        print(
            f"{report.checkpoint:>10}  {cluster:>7}  {_fmt(report.predicted_value):>9}  "
            f"{_fmt(report.actual_value):>8}  {report.delta:>+8.4f}  {'yes' if report.flagged else 'no'}"
        )
        if switched is not None:
            print(f"reassigned at checkpoint {report.checkpoint}: cluster {cluster} -> {switched} ({strategy.kind})")
    flagged = sum(r.flagged for r, _, _ in rows)
    print(f"flags: {flagged}  reassignments: {len(state.history)}  final cluster: {state.assigned_cluster}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    db = load_database(args.db)
    report = evaluate(
        db,
        _params(args),
        args.granularity,
        Strategy(args.strategy, args.delta),
        threshold=args.threshold,
        observe=args.observe,
        compare=args.compare,
    )
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
    if args.format == "json":
        print(json.dumps(report.to_dict(), sort_keys=True))
        return EXIT_OK
    print("project    initial  assigned  best  goodness      MAE     RMSE  baseline")
    for r in report.rows:
        print(
            f"{r.project_id:<10} {r.initial_cluster:>7}  {r.assigned_cluster:>8}  {r.best_cluster:>4}  "
            f"{r.goodness_of_fit:>8.4f} {r.mae:>8.4f} {r.rmse:>8.4f}  {r.baseline_mae:>8.4f}"
        )
    agg = report.aggregates
    print(
        f"strategy {report.strategy} (observe {report.observe}): mean MAE {_fmt(agg['mean_mae'])}, "
        f"median MAE {_fmt(agg['median_mae'])}, mean RMSE {_fmt(agg['mean_rmse'])}, "
        f"baseline mean MAE {_fmt(agg['baseline_mean_mae'])}, "
        f"assignment accuracy {agg['assignment_accuracy']:.4f}"
    )
    for kind, a in report.comparison.items():
        print(f"  {kind:<8} mean MAE {_fmt(a['mean_mae'])}  accuracy {a['assignment_accuracy']:.4f}")
    return EXIT_OK


def _add_clustering(p: argparse.ArgumentParser) -> None:
    p.add_argument("--granularity", type=_granularity, default=DEFAULT_GRANULARITY)
    p.add_argument("--linkage", choices=LINKAGES, default="average")
    stop = p.add_mutually_exclusive_group(required=True)
    stop.add_argument("--cut", type=_positive, help="stop merging above this linkage distance")
    stop.add_argument("--clusters", type=_count, help="stop merging at this many clusters")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sprint", description="Cluster-curve project estimation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="cluster a project database into a model file")
    p.add_argument("--db", required=True)
    _add_clustering(p)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("predict", help="predict a curve for a project context")
    p.add_argument("--model", required=True)
    p.add_argument("--context", default="", help="k=v[,k=v...]")
    p.add_argument("--total", type=_positive)
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument("--db", help="warn if the model was built from a different database")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("monitor", help="replay in-flight actuals against the prediction")
    p.add_argument("--model", required=True)
    p.add_argument("--project", required=True)
    p.add_argument("--tolerance", type=_positive, required=True)
    p.add_argument("--strategy", choices=STRATEGIES, required=True)
    p.add_argument("--delta", type=_non_negative, default=0.0)
    p.add_argument("--db", help="warn if the model was built from a different database")
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("evaluate", help="leave-one-out evaluation")
    p.add_argument("--db", required=True)
    p.add_argument("--strategy", choices=STRATEGIES, required=True)
    _add_clustering(p)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--delta", type=_non_negative, default=0.0)
    p.add_argument("--observe", type=int, help="checkpoints revealed before reassignment (default m // 2)")
    p.add_argument("--compare", action="store_true", help="also summarize every strategy")
    p.add_argument("--report", help="write the full JSON report here")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SprintError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
