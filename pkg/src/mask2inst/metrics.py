"""Count-based evaluation: MAPE, signed percentage error, rank correlations.

All metrics compare method counts m_i against reference counts h_i. MAPE is
the mean of |m_i - h_i| / h_i over a class; PE keeps the sign, so positive
values mean the method counted more instances than the reference. A zero
reference makes both undefined and raises rather than silently skewing
class averages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class MetricError(ValueError):
    """A metric is undefined for the given inputs."""


@dataclass(frozen=True)
class CountSeries:
    """Paired method/reference counts for one class."""

    class_id: str
    samples: tuple[tuple[str, int, int], ...]  # (image id, method count, reference count)

    def __post_init__(self) -> None:
        normalized = tuple((str(i), int(m), int(h)) for i, m, h in self.samples)
        for image_id, m, h in normalized:
            if m < 0 or h < 0:
                raise ValueError(f"counts must be non-negative, got ({m}, {h}) for sample {image_id!r}")
        object.__setattr__(self, "samples", normalized)

    @property
    def size(self) -> int:
        return len(self.samples)

    def method_counts(self) -> list[int]:
        return [m for _, m, _ in self.samples]

    def reference_counts(self) -> list[int]:
        return [h for _, _, h in self.samples]


def pe(m_i: int, h_i: int) -> float:
    """Signed percentage error (m - h) / h."""
    if h_i <= 0:
        raise MetricError(f"percentage error undefined for reference count {h_i}")
    return (m_i - h_i) / h_i


def mape(s: CountSeries) -> float:
    """Mean absolute percentage error over one class."""
    if s.size == 0:
        raise MetricError(f"MAPE undefined for empty series (class {s.class_id!r})")
    total = 0.0
    for image_id, m, h in s.samples:
        if h <= 0:
            raise MetricError(f"MAPE undefined: reference count is 0 for sample {image_id!r} in class {s.class_id!r}")
        total += abs(m - h) / h
    return total / s.size


def _validate_pair(x: list[float], y: list[float]) -> tuple[np.ndarray, np.ndarray]:
    if len(x) != len(y):
        raise MetricError(f"series length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise MetricError("correlation needs at least two samples")
    ax = np.asarray(x, dtype=np.float64)
    ay = np.asarray(y, dtype=np.float64)
    if np.all(ax == ax[0]) or np.all(ay == ay[0]):
        raise MetricError("correlation undefined for a constant series")
    return ax, ay


def pearson(x: list[float], y: list[float]) -> float:
    ax, ay = _validate_pair(x, y)
    dx = ax - ax.mean()
    dy = ay - ay.mean()
    return float(np.sum(dx * dy) / math.sqrt(float(np.sum(dx * dx)) * float(np.sum(dy * dy))))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties replaced by their average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman(x: list[float], y: list[float]) -> float:
    """Pearson correlation of average-ranked data."""
    ax, ay = _validate_pair(x, y)
    return pearson(_average_ranks(ax).tolist(), _average_ranks(ay).tolist())


def evaluate_dataset(series_by_method: dict[str, list[CountSeries]]) -> dict:
    """Assemble the per-class/per-method report.

    Report shape: ``{method: {class: {error, spearman, pearson, pe: [...]},
    "average": {error, spearman, pearson, pe: [...]}}}`` where the average
    block holds the across-class means and the pooled PE samples. Classes
    whose correlations are undefined (constant counts) report None there.
    """
    report: dict[str, dict] = {}
    for method, series_list in series_by_method.items():
        method_block: dict[str, dict] = {}
        errors: list[float] = []
        spearmans: list[float] = []
        pearsons: list[float] = []
        pooled_pe: list[float] = []
        for s in series_list:
            err = mape(s)
            pes = [pe(m, h) for _, m, h in s.samples]
            try:
                rho = spearman([float(v) for v in s.method_counts()], [float(v) for v in s.reference_counts()])
                r = pearson([float(v) for v in s.method_counts()], [float(v) for v in s.reference_counts()])
            except MetricError:
                rho = None
                r = None
            method_block[s.class_id] = {"error": err, "spearman": rho, "pearson": r, "pe": pes}
            errors.append(err)
            if rho is not None:
                spearmans.append(rho)
            if r is not None:
                pearsons.append(r)
            pooled_pe.extend(pes)
        if errors:
            method_block["average"] = {
                "error": sum(errors) / len(errors),
                "spearman": sum(spearmans) / len(spearmans) if spearmans else None,
                "pearson": sum(pearsons) / len(pearsons) if pearsons else None,
                "pe": pooled_pe,
            }
        report[method] = method_block
    return report
