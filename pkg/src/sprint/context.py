"""Nominal context knowledge: per-value weights, cluster signatures, goodness of fit.

A context value is typical for a cluster when it occurs more often among the
cluster's members than in the whole database. The weight of value ``v`` of
attribute ``a`` is the frequency difference ``f_cluster(v) - f_database(v)``
divided by the Euclidean norm of those differences over every value of ``a``
seen in the database, so weights lie in ``[-1, 1]`` and sum to zero per
attribute.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import EmptyInput

MISSING = "⊥"

ContextProfile = Mapping[str, str]


def fill_missing(profile: Mapping[str, str], attributes: Iterable[str]) -> dict[str, str]:
    """Return ``profile`` with every attribute in ``attributes`` present."""
    filled = {str(k): str(v) for k, v in profile.items()}
    for name in attributes:
        filled.setdefault(name, MISSING)
    return filled


@dataclass(frozen=True)
class ContextSignature:
    """Retained ``(value, weight)`` pairs per attribute, all above ``threshold``."""

    entries: Mapping[str, Mapping[str, float]] = field(default_factory=dict)
    threshold: float = 0.0

    def __post_init__(self) -> None:
        frozen = {
            a: dict(sorted((str(v), float(w)) for v, w in vals.items()))
            for a, vals in sorted(self.entries.items())
            if vals
        }
        object.__setattr__(self, "entries", frozen)
        object.__setattr__(self, "threshold", float(self.threshold))

    def weight(self, attribute: str, value: str) -> float | None:
        return self.entries.get(attribute, {}).get(value)

    def items(self) -> list[tuple[str, str, float]]:
        """Flat ``(attribute, value, weight)`` triples sorted by attribute then value."""
        return [(a, v, w) for a, vals in self.entries.items() for v, w in vals.items()]

    def retained(self) -> set[tuple[str, str]]:
        return {(a, v) for a, v, _ in self.items()}

    def top(self, n: int = 3) -> list[tuple[str, str, float]]:
        return sorted(self.items(), key=lambda t: (-t[2], t[0], t[1]))[:n]

    def __len__(self) -> int:
        return sum(len(v) for v in self.entries.values())


def _frequencies(profiles: Sequence[Mapping[str, str]], attribute: str) -> dict[str, float]:
    counts = Counter(p.get(attribute, MISSING) for p in profiles)
    n = len(profiles)
    return {v: c / n for v, c in counts.items()}


def attribute_weights(
    attribute: str,
    cluster_members: Sequence[Mapping[str, str]],
    database: Sequence[Mapping[str, str]],
) -> dict[str, float]:
    """Weights of every database-observed value of ``attribute``."""
    if not cluster_members or not database:
        raise EmptyInput("cluster and database must both be nonempty")
    f_c = _frequencies(cluster_members, attribute)
    f_d = _frequencies(database, attribute)
    values = sorted(set(f_d) | set(f_c))
    raw = {v: f_c.get(v, 0.0) - f_d.get(v, 0.0) for v in values}
    norm = math.sqrt(math.fsum(r * r for r in raw.values()))
    if norm == 0.0:
        return {v: 0.0 for v in values}
    return {v: max(-1.0, min(1.0, r / norm)) for v, r in raw.items()}


def value_weight(
    attribute: str,
    value: str,
    cluster_members: Sequence[Mapping[str, str]],
    database: Sequence[Mapping[str, str]],
) -> float:
    """Signed significance of ``attribute == value`` for the cluster.

    Returns 0 when the attribute has the same distribution in the cluster as
    in the database, and for values that never occur.
    """
    return attribute_weights(attribute, cluster_members, database).get(value, 0.0)


def build_signature(
    cluster_members: Sequence[Mapping[str, str]],
    database: Sequence[Mapping[str, str]],
    threshold: float = 0.0,
) -> ContextSignature:
    """Keep each member-observed value whose weight is strictly above ``threshold``."""
    if not cluster_members or not database:
        raise EmptyInput("cluster and database must both be nonempty")
    attributes = sorted({a for p in database for a in p} | {a for p in cluster_members for a in p})
    entries: dict[str, dict[str, float]] = {}
    for attribute in attributes:
        weights = attribute_weights(attribute, cluster_members, database)
        present = {p.get(attribute, MISSING) for p in cluster_members}
        kept = {v: w for v, w in weights.items() if v in present and w > threshold}
        if kept:
            entries[attribute] = kept
    return ContextSignature(entries, threshold)


def goodness_of_fit(project: Mapping[str, str], signature: ContextSignature) -> float:
    """Sum of retained signature weights matched by the project's context."""
    matched = []
    for attribute, value in project.items():
        w = signature.weight(attribute, value)
        if w is not None:
            matched.append(w)
    return math.fsum(matched)
