"""Bipolar hypervectors and their generators.

A hypervector is a 1-D ``np.int8`` array over {+1, -1}; a batch of them is a
2-D array with one vector per row. Logic-1 corresponds to +1 and logic-0 to -1
whenever vectors are bit-packed.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

MAGIC = b"HVST"
FORMAT_VERSION = 1
ENCODING_BITPACKED = 1
HEADER = struct.Struct("<4sHIIB")

# Maximal-length Fibonacci taps (exponents of the feedback polynomial,
# Xilinx XAPP052 table). Each is verified by brute force in the tests up to width 16.
MAXIMAL_TAPS: dict[int, tuple[int, ...]] = {
    2: (2, 1),
    3: (3, 2),
    4: (4, 3),
    5: (5, 3),
    6: (6, 5),
    7: (7, 6),
    8: (8, 6, 5, 4),
    9: (9, 5),
    10: (10, 7),
    11: (11, 9),
    12: (12, 6, 4, 1),
    13: (13, 4, 3, 1),
    14: (14, 5, 3, 1),
    15: (15, 14),
    16: (16, 15, 13, 4),
    17: (17, 14),
    18: (18, 11),
    19: (19, 6, 2, 1),
    20: (20, 17),
    21: (21, 19),
    22: (22, 21),
    23: (23, 18),
    24: (24, 23, 22, 17),
}


def as_hypervector(x) -> np.ndarray:
    """Validate ``x`` and return it as a 1-D int8 array."""
    hv = np.asarray(x)
    if hv.ndim != 1 or hv.size == 0:
        raise ValueError("a hypervector must be a non-empty 1-D array")
    if not np.all((hv == 1) | (hv == -1)):
        raise ValueError("hypervector elements must be +1 or -1")
    return hv.astype(np.int8, copy=False)


def _check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[-1] != y.shape[-1]:
        raise ValueError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")


def threshold_encode(sequence, T: float) -> np.ndarray:
    """-1 where ``T <= value`` and +1 elsewhere, so P(+1) is about ``T``.

    Works row-wise on 2-D input.
    """
    seq = np.asarray(sequence, dtype=np.float64)
    if seq.size == 0 or seq.shape[-1] == 0:
        raise ValueError("cannot encode an empty sequence")
    if not 0.0 <= T <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {T}")
    return np.where(T <= seq, -1, 1).astype(np.int8)


def generate_sobol_hypervectors(matrix, T: float) -> np.ndarray:
    """Threshold every row of a Sobol matrix; row order is preserved."""
    mat = np.asarray(matrix, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] == 0:
        raise ValueError("expected a non-empty 2-D Sobol matrix")
    return threshold_encode(mat, T)


@dataclass(frozen=True)
class LfsrConfig:
    width: int
    taps: int  # bit mask; bit t-1 set for each exponent t of the feedback polynomial
    seed: int

    def __post_init__(self):
        if self.width < 2:
            raise ValueError("LFSR width must be >= 2")
        if self.seed == 0:
            raise ValueError("an all-zero seed locks the LFSR")
        if not 0 < self.seed < 2**self.width:
            raise ValueError(f"seed must be in [1, 2^{self.width})")
        if self.taps <= 0 or self.taps >> self.width:
            raise ValueError("tap mask does not fit the register width")

    @classmethod
    def maximal(cls, width: int, seed: int = 1) -> "LfsrConfig":
        if width not in MAXIMAL_TAPS:
            raise ValueError(f"no maximal tap set tabulated for width {width}")
        return cls(width, taps_to_mask(MAXIMAL_TAPS[width]), seed)


def taps_to_mask(taps) -> int:
    mask = 0
    for t in taps:
        mask |= 1 << (t - 1)
    return mask


def _step_states(seed: int, taps: int, width: int, count: int) -> np.ndarray:
    full = (1 << width) - 1
    state = seed
    out = np.empty(count, dtype=np.int64)
    for i in range(count):
        out[i] = state
        feedback = (state & taps).bit_count() & 1
        state = ((state << 1) | feedback) & full
    return out


@lru_cache(maxsize=32)
def _cycle(width: int, taps: int) -> tuple[np.ndarray, np.ndarray] | None:
    """One full period from state 1 and each state's position in it, or None if not maximal."""
    period = (1 << width) - 1
    if width > 24:
        return None
    states = _step_states(1, taps, width, period)
    position = np.full(period + 1, -1, dtype=np.int64)
    position[states] = np.arange(period)
    if np.count_nonzero(position[1:] >= 0) != period:
        return None
    return states, position


def lfsr_states(config: LfsrConfig, count: int) -> np.ndarray:
    """Successive register states, starting with the seed."""
    if count < 1:
        raise ValueError("count must be >= 1")
    cycle = _cycle(config.width, config.taps)
    if cycle is None:
        return _step_states(config.seed, config.taps, config.width, count)
    states, position = cycle
    start = position[config.seed]
    return states[(start + np.arange(count)) % states.size]


def lfsr_sequence(config: LfsrConfig, count: int) -> np.ndarray:
    """LFSR output normalised to [0, 1) as ``state / 2^width``."""
    return lfsr_states(config, count) / float(1 << config.width)


def lfsr_width_for(dim: int) -> int:
    """Register width used for a hypervector of length ``dim`` (``ceil(log2 dim)``, >= 2)."""
    return max(2, (dim - 1).bit_length())


def lfsr_hypervector(dim: int, T: float, seed: int, width: int | None = None) -> np.ndarray:
    width = width or lfsr_width_for(dim)
    return threshold_encode(lfsr_sequence(LfsrConfig.maximal(width, seed), dim), T)


def random_hypervector(dim: int, T: float, seed) -> np.ndarray:
    """Each element is +1 with probability ``T`` (PCG64 uniform draws)."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    return threshold_encode(rng.random(dim), T)


def rotate(hv, k: int) -> np.ndarray:
    """Circular shift toward higher indexes by ``k`` positions."""
    return np.roll(np.asarray(hv), k, axis=-1)


def bind(x, y) -> np.ndarray:
    x, y = np.asarray(x), np.asarray(y)
    _check_same_dim(x, y)
    return (x * y).astype(np.int8)


def negate(hv) -> np.ndarray:
    return (-np.asarray(hv)).astype(np.int8)


@dataclass
class Accumulator:
    sums: np.ndarray
    count: int = 0

    @property
    def dim(self) -> int:
        return self.sums.shape[0]

    def add(self, hv) -> "Accumulator":
        hv = np.asarray(hv)
        _check_same_dim(self.sums, hv)
        if hv.ndim == 2:
            self.sums += hv.sum(axis=0, dtype=np.int64)
            self.count += hv.shape[0]
        else:
            self.sums += hv
            self.count += 1
        return self

    @classmethod
    def zeros(cls, dim: int) -> "Accumulator":
        return cls(np.zeros(dim, dtype=np.int64), 0)


def accumulate(vectors) -> Accumulator:
    """Element-wise algebraic sum of a non-empty list (or 2-D array) of hypervectors."""
    if len(vectors) == 0:
        raise ValueError("nothing to accumulate")
    dims = {np.shape(v)[-1] for v in vectors}
    if len(dims) != 1:
        raise ValueError(f"mismatched dimensions: {sorted(dims)}")
    stacked = np.asarray(vectors, dtype=np.int64)
    return Accumulator(stacked.sum(axis=0), stacked.shape[0])


def sign_threshold(acc) -> np.ndarray:
    """Sign of the sums with ties resolved to +1. Accepts an Accumulator or raw sums."""
    sums = acc.sums if isinstance(acc, Accumulator) else np.asarray(acc)
    return np.where(sums >= 0, 1, -1).astype(np.int8)


def pack(hvs) -> np.ndarray:
    """Bit-pack along the last axis: +1 -> 1, -1 -> 0, zero padded to whole bytes."""
    return np.packbits(np.asarray(hvs) > 0, axis=-1)


def unpack(packed, dim: int) -> np.ndarray:
    bits = np.unpackbits(np.asarray(packed, dtype=np.uint8), axis=-1, count=dim)
    return (bits.astype(np.int8) * 2 - 1).astype(np.int8)


def save_hypervectors(path, hvs, metadata: dict | None = None) -> Path:
    """Write a bit-packed hypervector set plus a ``.json`` sidecar next to it."""
    hvs = np.atleast_2d(np.asarray(hvs))
    path = Path(path)
    count, dim = hvs.shape
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, FORMAT_VERSION, count, dim, ENCODING_BITPACKED))
        fh.write(pack(hvs).tobytes())
    sidecar = path.with_name(path.name + ".json")
    sidecar.write_text(json.dumps(metadata or {}, indent=2, sort_keys=True))
    return path


def load_hypervectors(path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < HEADER.size:
        raise ValueError(f"{path} is too short to be a hypervector set")
    magic, version, count, dim, encoding = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path} is not a hypervector set (bad magic {magic!r})")
    if version != FORMAT_VERSION or encoding != ENCODING_BITPACKED:
        raise ValueError(f"unsupported version/encoding {version}/{encoding}")
    row_bytes = (dim + 7) // 8
    body = np.frombuffer(raw, dtype=np.uint8, offset=HEADER.size)
    if body.size != count * row_bytes:
        raise ValueError(f"{path}: expected {count * row_bytes} payload bytes, got {body.size}")
    hvs = unpack(body.reshape(count, row_bytes), dim)
    sidecar = path.with_name(path.name + ".json")
    meta = json.loads(sidecar.read_text()) if sidecar.exists() else {}
    return hvs, meta
