"""Synthetic project portfolios with planted curve shapes, for benchmarks and tests."""

from __future__ import annotations

from typing import Any, Callable

import numpy as np

SHAPES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "front": lambda t: 1.0 - (1.0 - t) ** 2.5,
    "back": lambda t: t ** 2.5,
}
# complexity value that goes with each shape when context agrees with it
TYPICAL_COMPLEXITY = {"front": "high", "back": "low"}


def shape_template(shape: str, m: int) -> list[float]:
    """Noise-free characteristic curve of a planted shape."""
    grid = np.arange(1, m + 1) / m
    return (SHAPES[shape](grid) * 100.0).tolist()


def planted_portfolio(
    n: int = 200,
    *,
    seed: int = 0,
    noise: float = 0.05,
    correlation: float = 0.9,
    samples: tuple[int, int] = (8, 16),
) -> tuple[dict[str, Any], dict[str, str]]:
    """Database document with two planted cumulative shapes.

    Half the projects follow the front-loaded shape, half the back-loaded
    one. Every per-interval increment is multiplied by a factor drawn from
    ``1 ± noise``. The ``complexity`` attribute matches the shape's typical
    value with probability ``correlation``. Returns the document and the
    planted shape per project id.
    """
    rng = np.random.default_rng(seed)
    projects = []
    labels: dict[str, str] = {}
    for i in range(n):
        pid = f"p{i:04d}"
        shape = "front" if i % 2 == 0 else "back"
        k = int(rng.integers(samples[0], samples[1] + 1))
        times = np.sort(rng.uniform(0.02, 0.98, size=k - 1))
        times = np.append(times, 1.0)
        f = SHAPES[shape](np.concatenate([[0.0], times]))
        increments = np.diff(f) * rng.uniform(1 - noise, 1 + noise, size=k)
        total = float(rng.uniform(200, 5000))
        values = increments / increments.sum() * total
        duration = float(rng.integers(6, 36))
        typical = TYPICAL_COMPLEXITY[shape]
        other = next(v for v in TYPICAL_COMPLEXITY.values() if v != typical)
        complexity = typical if rng.random() < correlation else other
        projects.append(
            {
                "id": pid,
                "planned_duration": duration,
                "baseline_total": round(total, 6),
                "context": {"complexity": complexity},
                "series": {
                    "mode": "incremental",
                    "points": [[round(float(t) * duration, 9), round(float(v), 9)] for t, v in zip(times, values)],
                },
            }
        )
        labels[pid] = shape
    return {"projects": projects}, labels
