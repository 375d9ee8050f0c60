"""Overlap counts, stochastic cross-correlation (SCC), cosine and Hamming metrics.

SCC follows the usual stochastic-computing definition: with ``a`` the number of
positions where both vectors are +1, ``b`` (+1, -1), ``c`` (-1, +1) and ``d``
(-1, -1), the numerator ``ad - bc`` is normalised by the largest value it could
reach given the two marginals, so +1 means maximal overlap, -1 minimal overlap
and 0 independence. Numerator and denominator are exact integers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sobolhdc.errors import DegenerateInputError
from sobolhdc.hypervector import Accumulator, as_hypervector


@dataclass(frozen=True)
class OverlapCounts:
    a: int
    b: int
    c: int
    d: int

    @property
    def dim(self) -> int:
        return self.a + self.b + self.c + self.d


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x, y = as_hypervector(x), as_hypervector(y)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.size} vs {y.size}")
    return x, y


def overlap_counts(x, y) -> OverlapCounts:
    x, y = _pair(x, y)
    xp, yp = x > 0, y > 0
    a = int(np.count_nonzero(xp & yp))
    b = int(np.count_nonzero(xp & ~yp))
    c = int(np.count_nonzero(~xp & yp))
    return OverlapCounts(a, b, c, x.size - a - b - c)


def scc_from_counts(a: int, b: int, c: int, d: int) -> float:
    """SCC of a single contingency table; 0 when the selected denominator vanishes."""
    n = a + b + c + d
    num = a * d - b * c
    if a * d > b * c:
        den = n * min(a + b, a + c) - (a + b) * (a + c)
    else:
        den = (a + b) * (a + c) - n * max(a - d, 0)
    if den == 0:
        return 0.0
    return num / den


def scc_arrays(a, b, c, d) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised SCC over integer count arrays.

    Returns ``(scc, degenerate)`` where ``degenerate`` marks zero denominators
    (those entries are set to 0).
    """
    a, b, c, d = (np.asarray(v, dtype=np.int64) for v in (a, b, c, d))
    n = a + b + c + d
    num = a * d - b * c
    r, s = a + b, a + c
    positive = a * d > b * c
    den = np.where(
        positive,
        n * np.minimum(r, s) - r * s,
        r * s - n * np.maximum(a - d, 0),
    )
    degenerate = den == 0
    out = np.divide(num, den, out=np.zeros(num.shape, dtype=np.float64), where=~degenerate)
    return out, degenerate


def scc(x, y) -> float:
    k = overlap_counts(x, y)
    return scc_from_counts(k.a, k.b, k.c, k.d)


def cosine(x, y) -> float:
    """Cosine similarity of two bipolar vectors, i.e. ``dot(x, y) / D``."""
    x, y = _pair(x, y)
    return float(np.dot(x.astype(np.int64), y.astype(np.int64))) / x.size


def cosine_int(x, y) -> float:
    """Cosine over integer vectors (e.g. un-thresholded accumulators)."""
    x = np.asarray(x.sums if isinstance(x, Accumulator) else x, dtype=np.float64)
    y = np.asarray(y.sums if isinstance(y, Accumulator) else y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise DegenerateInputError("cosine is undefined for an all-zero vector")
    return float(np.dot(x, y) / (nx * ny))


def hamming(x, y) -> int:
    """Number of positions where the vectors differ (``b + c``)."""
    x, y = _pair(x, y)
    return int(np.count_nonzero(x != y))


def pairwise_overlaps(hvs, method: str = "matmul") -> tuple[np.ndarray, ...]:
    """All-pairs ``(a, b, c, d)`` count matrices for a 2-D batch of hypervectors.

    ``method="matmul"`` counts co-occurring +1s with a float64 matrix product
    (exact below 2^53); ``method="popcount"`` works on bit-packed rows with
    hardware popcount. Both give identical integers.
    """
    H = np.asarray(hvs)
    if H.ndim != 2:
        raise ValueError("expected a 2-D batch of hypervectors")
    n, D = H.shape
    ones = np.count_nonzero(H > 0, axis=1).astype(np.int64)
    if method == "matmul":
        B = (H > 0).astype(np.float64)
        a = np.rint(B @ B.T).astype(np.int64)
    elif method == "popcount":
        a = _popcount_overlaps(H)
    else:
        raise ValueError(f"unknown method {method!r}")
    b = ones[:, None] - a
    c = ones[None, :] - a
    d = D - a - b - c
    return a, b, c, d


def _popcount_overlaps(H: np.ndarray) -> np.ndarray:
    packed = np.packbits(H > 0, axis=1)
    pad = (-packed.shape[1]) % 8
    if pad:
        packed = np.pad(packed, ((0, 0), (0, pad)))
    words = packed.view(np.uint64)
    n = words.shape[0]
    a = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        row = np.bitwise_count(words[i] & words[i:]).sum(axis=1, dtype=np.int64)
        a[i, i:] = row
        a[i:, i] = row
    return a


def pairwise_scc(hvs, method: str = "matmul") -> tuple[np.ndarray, np.ndarray]:
    """``(scc_matrix, degenerate_mask)`` over all ordered pairs, diagonal included."""
    return scc_arrays(*pairwise_overlaps(hvs, method))


def pairwise_cosine(hvs) -> np.ndarray:
    H = np.asarray(hvs, dtype=np.float64)
    return H @ H.T / H.shape[1]


def pairwise_cosine_logic(hvs) -> np.ndarray:
    """Cosine between the logic-domain (0/1) forms, ``a / sqrt((a+b)(a+c))``."""
    B = (np.asarray(hvs) > 0).astype(np.float64)
    dots = B @ B.T
    norms = np.sqrt(np.diag(dots))
    denom = np.outer(norms, norms)
    return np.divide(dots, denom, out=np.zeros_like(dots), where=denom > 0)


@dataclass(frozen=True)
class RangeReport:
    min_scc: float
    max_scc: float
    min_cos: float
    max_cos: float
    min_cos_logic: float
    max_cos_logic: float
    degenerate_pairs: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def scc_range_monitor(hvs) -> RangeReport:
    """Extremes of SCC and cosine over all unordered pairs of distinct vectors.

    Self-pairs are excluded. Both the bipolar cosine and the logic-domain (0/1)
    cosine are reported.
    """
    H = np.asarray(hvs)
    if H.ndim != 2 or H.shape[0] < 2:
        raise ValueError("need at least two hypervectors")
    S, degenerate = pairwise_scc(H)
    iu = np.triu_indices(H.shape[0], k=1)
    sv = S[iu]
    cv = pairwise_cosine(H)[iu]
    lv = pairwise_cosine_logic(H)[iu]
    return RangeReport(
        float(sv.min()), float(sv.max()),
        float(cv.min()), float(cv.max()),
        float(lv.min()), float(lv.max()),
        int(np.count_nonzero(degenerate[iu])),
    )
