"""Predictor / personalization-gain correlation analysis.

Builds the per-profile correlation table (37 predictors x profiles), the
mean / signed-maximum summary over profiles, and the top-N predictor
selection used to shrink the decision models' feature set. Cells are
undefined (None) when either series is constant within a profile or the
profile holds fewer than two triplets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .predictors import PREDICTOR_NAMES

METHODS = ("pearson", "spearman", "kendall")


def _validate(x: Sequence[float], y: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    if len(x) != len(y):
        raise ValueError(f"series length mismatch: {len(x)} vs {len(y)}")
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def pearson(x: Sequence[float], y: Sequence[float]) -> Optional[float]:
    """Sample Pearson r; None when either series is constant or n < 2."""
    xa, ya = _validate(x, y)
    n = len(xa)
    if n < 2:
        return None
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    sx = float(np.dot(xc, xc))
    sy = float(np.dot(yc, yc))
    if sx == 0.0 or sy == 0.0:
        return None
    return float(np.dot(xc, yc) / math.sqrt(sx * sy))


def _midranks(a: np.ndarray) -> np.ndarray:
    """Average ranks (1-based) with ties sharing their mean rank."""
    order = np.argsort(a, kind="mergesort")
    ranks = np.empty(len(a), dtype=float)
    i = 0
    while i < len(a):
        j = i
        while j + 1 < len(a) and a[order[j + 1]] == a[order[i]]:
            j += 1
        ranks[order[i: j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> Optional[float]:
    """Pearson correlation of midranks; None under zero rank variance."""
    xa, ya = _validate(x, y)
    if len(xa) < 2:
        return None
    return pearson(_midranks(xa), _midranks(ya))


def kendall(x: Sequence[float], y: Sequence[float]) -> Optional[float]:
    """Kendall tau-b with tie correction; None when a side is all ties."""
    xa, ya = _validate(x, y)
    n = len(xa)
    if n < 2:
        return None
    concordant = discordant = 0
    for i in range(n - 1):
        dx = xa[i + 1:] - xa[i]
        dy = ya[i + 1:] - ya[i]
        prod = dx * dy
        concordant += int(np.count_nonzero(prod > 0))
        discordant += int(np.count_nonzero(prod < 0))
    n0 = n * (n - 1) // 2
    n1 = sum(c * (c - 1) // 2 for c in _tie_counts(xa))
    n2 = sum(c * (c - 1) // 2 for c in _tie_counts(ya))
    if n0 == n1 or n0 == n2:
        return None
    return (concordant - discordant) / math.sqrt((n0 - n1) * (n0 - n2))


def _tie_counts(a: np.ndarray) -> list[int]:
    _, counts = np.unique(a, return_counts=True)
    return [int(c) for c in counts if c > 1]


_METHOD_FN = {"pearson": pearson, "spearman": spearman, "kendall": kendall}


@dataclass(frozen=True)
class CorrelationTable:
    """rows: predictor names, columns: profile ids; None marks undefined."""

    predictors: tuple[str, ...]
    profiles: tuple[str, ...]
    cells: dict[tuple[str, str], Optional[float]]

    def cell(self, predictor: str, profile: str) -> Optional[float]:
        return self.cells[(predictor, profile)]


@dataclass(frozen=True)
class SummaryRow:
    predictor: str
    mean: Optional[float]      # over defined cells
    max_signed: Optional[float]  # cell of maximum magnitude, sign kept


@dataclass(frozen=True)
class CorrelationSummary:
    rows: tuple[SummaryRow, ...]

    def row(self, predictor: str) -> SummaryRow:
        for r in self.rows:
            if r.predictor == predictor:
                return r
        raise KeyError(predictor)


def correlation_table(rows: Sequence[tuple[str, dict[str, float], float]],
                      method: str = "pearson",
                      predictors: Sequence[str] = PREDICTOR_NAMES,
                      ) -> CorrelationTable:
    """Correlate each predictor with the personalization gain per profile.

    `rows` are (profile_id, predictor value map, diff_perso) triples.
    """
    if method not in _METHOD_FN:
        raise ValueError(f"unknown correlation method: {method!r}")
    fn = _METHOD_FN[method]
    by_profile: dict[str, list[tuple[dict[str, float], float]]] = {}
    for pid, values, diff in rows:
        by_profile.setdefault(pid, []).append((values, diff))
    profiles = tuple(sorted(by_profile))
    cells: dict[tuple[str, str], Optional[float]] = {}
    for pid in profiles:
        group = by_profile[pid]
        diffs = [d for _, d in group]
        for name in predictors:
            xs = [v[name] for v, _ in group]
            cells[(name, pid)] = fn(xs, diffs)
    return CorrelationTable(predictors=tuple(predictors), profiles=profiles,
                            cells=cells)


def summarize(table: CorrelationTable) -> CorrelationSummary:
    """Mean and signed maximum-magnitude cell per predictor."""
    rows = []
    for name in table.predictors:
        defined = [table.cells[(name, pid)] for pid in table.profiles
                   if table.cells[(name, pid)] is not None]
        if not defined:
            rows.append(SummaryRow(predictor=name, mean=None, max_signed=None))
            continue
        mean = sum(defined) / len(defined)
        max_signed = max(defined, key=abs)
        rows.append(SummaryRow(predictor=name, mean=mean, max_signed=max_signed))
    return CorrelationSummary(rows=tuple(rows))


def select_top(summary: CorrelationSummary, n: int) -> list[str]:
    """Predictors by descending |mean| correlation, ties lexicographic.

    Rows with an undefined mean sort last.
    """
    if n < 1:
        raise ValueError(f"selection size must be >= 1, got {n}")
    ranked = sorted(summary.rows,
                    key=lambda r: (-(abs(r.mean) if r.mean is not None else -1.0),
                                   r.predictor))
    return [r.predictor for r in ranked[:n]]
