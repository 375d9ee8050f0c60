"""Choose mutually uncorrelated Sobol sequences for an item memory.

Pipeline: threshold the first ``n`` Sobol dimensions into hypervectors, build
the matrix of absolute SCC values over every pair, rank columns by their sums
(least correlated with everything first), then run the minimum-of-minima step
that turns the best-ranked rows' nearest-neighbour lists into ``k`` distinct
sequence indexes.

Indexes reported to callers are 1-based Sobol dimension numbers.
"""
from __future__ import annotations

import datetime as _dt
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from sobolhdc.errors import CapacityError, DegenerateInputError
from sobolhdc.hypervector import generate_sobol_hypervectors
from sobolhdc.similarity import pairwise_scc
from sobolhdc.sobol import MAX_DIMENSIONS, SobolDirectionTable, default_table, sobol_matrix

STRATEGIES = ("column", "frequency")


@dataclass
class DistanceMatrix:
    values: np.ndarray  # |SCC|, symmetric, unit diagonal
    degenerate: np.ndarray  # True where the SCC denominator vanished

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass
class RankedColumns:
    vals: np.ndarray
    idxs: np.ndarray  # 1-based


@dataclass
class SelectionResult:
    indexes: list[int]
    threshold: float
    k: int
    strategy: str = "column"
    mean_abs_scc: float = float("nan")
    population_mean_abs_scc: float = float("nan")
    hypervectors: np.ndarray | None = field(default=None, repr=False)

    def report(self, dim: int, **extra) -> dict:
        out = {
            "D": dim,
            "T": self.threshold,
            "k": self.k,
            "strategy": self.strategy,
            "indexes": list(self.indexes),
            "mean_abs_scc": self.mean_abs_scc,
            "population_mean_abs_scc": self.population_mean_abs_scc,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        }
        out.update(extra)
        return out


def distance_matrix(hvs, method: str = "matmul") -> DistanceMatrix:
    """Absolute SCC over all pairs.

    Pairs whose SCC is undefined (a constant vector is involved) are flagged and
    given distance 1 so they are never mistaken for uncorrelated ones.
    """
    H = np.asarray(hvs)
    if H.ndim != 2 or H.shape[0] < 2:
        raise ValueError("need at least two hypervectors of equal dimension")
    S, degenerate = pairwise_scc(H, method=method)
    values = np.abs(S)
    values[degenerate] = 1.0
    np.fill_diagonal(values, 1.0)
    return DistanceMatrix(values, degenerate)


def rank_by_column_sum(dm: DistanceMatrix) -> RankedColumns:
    sums = dm.values.sum(axis=0)
    order = np.argsort(sums, kind="stable")
    return RankedColumns(sums[order], order + 1)


def _neighbour_lists(ranked: RankedColumns, dm: DistanceMatrix, k: int) -> np.ndarray:
    """k x (n-1) array: for each top-ranked row, other indexes by ascending distance (0-based)."""
    rows = []
    for idx in ranked.idxs[:k] - 1:
        row = dm.values[idx]
        order = np.argsort(row, kind="stable")
        rows.append(order[order != idx])
    return np.array(rows)


def _column_modes(concat: np.ndarray, k: int) -> list[int]:
    # most frequent index per neighbour-rank column, ties to the smaller index;
    # a repeat skips ahead to the next column
    picked: list[int] = []
    seen: set[int] = set()
    for col in concat.T:
        counts = np.bincount(col)
        mode = int(np.argmax(counts))
        if mode not in seen:
            seen.add(mode)
            picked.append(mode)
            if len(picked) == k:
                break
    return picked


def _global_modes(concat: np.ndarray, k: int) -> list[int]:
    # frequency over each row's k nearest neighbours; ties by earliest rank, then index
    head = concat[:, :k]
    counts = Counter(head.ravel().tolist())
    first_pos = {}
    for pos in range(head.shape[1]):
        for idx in head[:, pos].tolist():
            first_pos.setdefault(idx, pos)
    order = sorted(counts, key=lambda i: (-counts[i], first_pos[i], i))
    return order[:k]


def min_of_minima(
    ranked: RankedColumns, dm: DistanceMatrix, k: int, strategy: str = "column"
) -> SelectionResult:
    """Pick ``k`` distinct indexes from the nearest-neighbour lists of the ``k`` best columns.

    ``strategy="column"`` takes the per-column mode of the stacked lists (column
    ``c`` holds every row's ``c``-th least correlated partner), moving on to the
    next column whenever a mode was already taken. ``strategy="frequency"``
    ranks indexes by how often they occur among each row's first ``k`` partners.
    If the lists run out before ``k`` indexes are found, the remainder is filled
    in column-rank order.
    """
    n = dm.n
    if not 2 <= k <= n:
        raise ValueError(f"k must lie in [2, {n}], got {k}")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    concat = _neighbour_lists(ranked, dm, k)
    picked = _column_modes(concat, k) if strategy == "column" else _global_modes(concat, k)
    if len(picked) < k:
        taken = set(picked)
        for idx in (ranked.idxs - 1).tolist():
            if idx not in taken:
                picked.append(idx)
                taken.add(idx)
                if len(picked) == k:
                    break
    return SelectionResult([i + 1 for i in picked], float("nan"), k, strategy)


def mean_abs_scc(dm: DistanceMatrix, indexes) -> float:
    """Mean |SCC| over distinct pairs of the given 1-based indexes."""
    sel = np.asarray(indexes) - 1
    sub = dm.values[np.ix_(sel, sel)]
    iu = np.triu_indices(len(sel), k=1)
    return float(sub[iu].mean())


def select_sobol_hypervectors(
    table: SobolDirectionTable | None,
    D: int,
    T: float,
    k: int,
    num_sequences: int = MAX_DIMENSIONS,
    strategy: str = "column",
    method: str = "matmul",
) -> SelectionResult:
    """Full selection pipeline over the first ``num_sequences`` Sobol dimensions."""
    table = table or default_table()
    if D < 16:
        raise ValueError("hypervector size must be at least 16")
    num_sequences = min(num_sequences, table.max_dimensions)
    if k > num_sequences:
        raise CapacityError(f"cannot select {k} sequences out of {num_sequences}")
    if not 0.0 < T < 1.0:
        raise DegenerateInputError(f"T={T} makes every hypervector constant")
    hvs = generate_sobol_hypervectors(sobol_matrix(table, num_sequences, D), T)
    constant = np.all(hvs == hvs[:, :1], axis=1)
    if np.count_nonzero(~constant) < k:
        raise DegenerateInputError(
            f"only {np.count_nonzero(~constant)} non-constant hypervectors at D={D}, T={T}"
        )
    dm = distance_matrix(hvs, method=method)
    result = min_of_minima(rank_by_column_sum(dm), dm, k, strategy)
    result.threshold = T
    result.mean_abs_scc = mean_abs_scc(dm, result.indexes)
    result.population_mean_abs_scc = mean_abs_scc(dm, np.arange(1, dm.n + 1))
    result.hypervectors = hvs[np.asarray(result.indexes) - 1]
    return result


def write_report(path, report: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(report, indent=2))
    return path
