"""Sobol sequence generation from Joe-Kuo direction numbers.

Points are produced in natural (non Gray-code) order: the value of point ``i``
in dimension ``j`` is the XOR of the direction numbers selected by the set bits
of ``i``. All arithmetic is on 52-bit fixed-point integers, so every float that
comes out is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from sobolhdc.errors import CapacityError, DirectionFileError

MAX_DIMENSIONS = 1111
FRACTION_BITS = 52

BUNDLED_TABLES = {
    "property-a": "property-a-1111.txt",
    "new-joe-kuo": "new-joe-kuo-1111.txt",
}
DEFAULT_TABLE = "property-a"
DEFAULT_DIRECTION_FILE = BUNDLED_TABLES[DEFAULT_TABLE]


@dataclass(frozen=True)
class DirectionEntry:
    """Primitive polynomial and initial m values for one Sobol dimension.

    ``poly_coeffs`` holds a_1 .. a_{s-1} (a_1 is the coefficient of x^{s-1}).
    Dimension 1 is the van der Corput sequence, represented with ``degree=0``.
    """

    dimension_index: int
    degree: int
    poly_coeffs: tuple[int, ...]
    initial_m: tuple[int, ...]

    def __post_init__(self):
        if self.dimension_index < 1:
            raise ValueError("dimension_index must be >= 1")
        if self.degree == 0:
            if self.dimension_index != 1 or self.poly_coeffs or self.initial_m:
                raise ValueError("degree 0 is reserved for the implicit dimension 1")
            return
        if self.degree < 1:
            raise ValueError("degree must be positive")
        if len(self.poly_coeffs) != self.degree - 1:
            raise ValueError(
                f"expected {self.degree - 1} polynomial coefficients, got {len(self.poly_coeffs)}"
            )
        if any(a not in (0, 1) for a in self.poly_coeffs):
            raise ValueError("polynomial coefficients must be 0 or 1")
        if len(self.initial_m) != self.degree:
            raise ValueError(f"expected {self.degree} initial m values, got {len(self.initial_m)}")
        for k, m in enumerate(self.initial_m, start=1):
            if m % 2 == 0 or not 0 < m < 2**k:
                raise ValueError(f"m_{k}={m} must be odd and < 2^{k}")

    @classmethod
    def van_der_corput(cls) -> "DirectionEntry":
        return cls(1, 0, (), ())


@dataclass(frozen=True)
class SobolDirectionTable:
    entries: tuple[DirectionEntry, ...]
    max_dimensions: int

    def __post_init__(self):
        for pos, e in enumerate(self.entries):
            if e.dimension_index != pos + 2:
                raise ValueError(
                    f"entry {pos} has dimension {e.dimension_index}, expected {pos + 2}"
                )
        if not 1 <= self.max_dimensions <= min(MAX_DIMENSIONS, len(self.entries) + 1):
            raise ValueError(f"max_dimensions out of range: {self.max_dimensions}")

    def entry(self, dim: int) -> DirectionEntry:
        if not 1 <= dim <= self.max_dimensions:
            raise ValueError(f"dimension {dim} outside 1..{self.max_dimensions}")
        if dim == 1:
            return DirectionEntry.van_der_corput()
        return self.entries[dim - 2]


def parse_direction_file(path, max_dimensions: int = MAX_DIMENSIONS) -> SobolDirectionTable:
    """Load a Joe-Kuo style ``d s a m_1 ... m_s`` file.

    Lines starting with ``#`` are ignored, as is a first line whose leading field
    is not an integer (the published files carry a ``d s a m_i`` header).
    Dimensions above ``max_dimensions`` are dropped.
    """
    max_dimensions = min(max_dimensions, MAX_DIMENSIONS)
    entries: list[DirectionEntry] = []
    text = Path(path).read_text()
    seen_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if not seen_data and not fields[0].lstrip("-").isdigit():
            continue  # header
        seen_data = True
        try:
            values = [int(f) for f in fields]
        except ValueError:
            raise DirectionFileError(f"non-integer field in {raw!r}", lineno) from None
        if len(values) < 3:
            raise DirectionFileError(f"expected 'd s a m_1 ... m_s', got {raw!r}", lineno)
        d, s, a, *m = values
        if d > max_dimensions:
            break
        if s < 1:
            raise DirectionFileError(f"degree must be positive, got {s}", lineno)
        if len(m) != s:
            raise DirectionFileError(f"degree {s} needs {s} m values, got {len(m)}", lineno)
        if not 0 <= a < 2 ** (s - 1):
            raise DirectionFileError(f"coefficient pattern {a} does not fit degree {s}", lineno)
        if d != len(entries) + 2:
            raise DirectionFileError(f"expected dimension {len(entries) + 2}, got {d}", lineno)
        coeffs = tuple((a >> (s - 1 - i)) & 1 for i in range(1, s))
        try:
            entries.append(DirectionEntry(d, s, coeffs, tuple(m)))
        except ValueError as exc:
            raise DirectionFileError(str(exc), lineno) from None
    return SobolDirectionTable(tuple(entries), min(max_dimensions, len(entries) + 1))


@lru_cache(maxsize=None)
def _bundled(name: str) -> SobolDirectionTable:
    ref = resources.files("sobolhdc") / "data" / BUNDLED_TABLES[name]
    with resources.as_file(ref) as path:
        return parse_direction_file(path)


def default_table() -> SobolDirectionTable:
    """The bundled default table (1111 dimensions, Property A in every leading block)."""
    return _bundled(DEFAULT_TABLE)


def load_table(name_or_path=None, max_dimensions: int = MAX_DIMENSIONS) -> SobolDirectionTable:
    """A bundled table by name (``property-a``, ``new-joe-kuo``) or a direction file on disk."""
    if name_or_path is None:
        return default_table()
    key = str(name_or_path)
    if key in BUNDLED_TABLES:
        table = _bundled(key)
        if max_dimensions >= table.max_dimensions:
            return table
        return SobolDirectionTable(table.entries[: max_dimensions - 1], max_dimensions)
    path = Path(key)
    if not path.is_file():
        raise FileNotFoundError(
            f"direction file {key!r} not found (bundled tables: {', '.join(BUNDLED_TABLES)})"
        )
    return parse_direction_file(path, max_dimensions)


def direction_integers(entry: DirectionEntry, count: int) -> list[int]:
    """The odd integers m_1 .. m_count of the direction-number recurrence."""
    if count < 1:
        raise ValueError("count must be >= 1")
    s = entry.degree
    if s == 0:
        return [1] * count
    m = list(entry.initial_m[:count])
    for k in range(s, count):
        # m_k = 2 a_1 m_{k-1} ^ 4 a_2 m_{k-2} ^ ... ^ 2^s m_{k-s} ^ m_{k-s}  (0-based k here)
        new = m[k - s] ^ (m[k - s] << s)
        for i, a in enumerate(entry.poly_coeffs, start=1):
            if a:
                new ^= m[k - i] << i
        m.append(new)
    return m


def direction_numbers(entry: DirectionEntry, count: int) -> list[float]:
    """Direction numbers v_k = m_k / 2^k for k = 1 .. count."""
    return [m / 2.0**k for k, m in enumerate(direction_integers(entry, count), start=1)]


def _fixed_point_directions(entry: DirectionEntry, bits: int) -> np.ndarray:
    m = direction_integers(entry, bits)
    return np.array([mk << (FRACTION_BITS - k) for k, mk in enumerate(m, start=1)], dtype=np.uint64)


def _bits_needed(num_points: int, skip: int) -> int:
    last = skip + num_points - 1
    bits = max(1, last.bit_length())
    if bits > FRACTION_BITS:
        raise CapacityError(f"at most 2^{FRACTION_BITS} points are supported")
    return bits


def _points(directions: np.ndarray, indices: np.ndarray) -> np.ndarray:
    x = np.zeros(indices.shape, dtype=np.uint64)
    for k, v in enumerate(directions):
        x ^= np.where((indices >> np.uint64(k)) & np.uint64(1), v, np.uint64(0))
    return x.astype(np.float64) / 2.0**FRACTION_BITS


def sobol_dimension(
    table: SobolDirectionTable, dim: int, num_points: int, skip: int = 0
) -> np.ndarray:
    """Points ``skip .. skip+num_points-1`` of Sobol dimension ``dim`` (1-based)."""
    if num_points < 1:
        raise ValueError("num_points must be >= 1")
    if skip < 0:
        raise ValueError("skip must be >= 0")
    entry = table.entry(dim)
    bits = _bits_needed(num_points, skip)
    idx = np.arange(skip, skip + num_points, dtype=np.uint64)
    return _points(_fixed_point_directions(entry, bits), idx)


def sobol_matrix(
    table: SobolDirectionTable, num_sequences: int, num_points: int, skip: int = 0
) -> np.ndarray:
    """``num_sequences x num_points`` matrix; row ``i`` is dimension ``i + 1``."""
    if num_sequences < 1:
        raise ValueError("num_sequences must be >= 1")
    if num_sequences > table.max_dimensions:
        raise CapacityError(
            f"requested {num_sequences} Sobol sequences but only {table.max_dimensions} "
            f"are available (the generator supports at most {MAX_DIMENSIONS})"
        )
    if num_points < 1:
        raise ValueError("num_points must be >= 1")
    bits = _bits_needed(num_points, skip)
    V = np.stack([_fixed_point_directions(table.entry(d), bits) for d in range(1, num_sequences + 1)])
    idx = np.arange(skip, skip + num_points, dtype=np.uint64)
    x = np.zeros((num_sequences, num_points), dtype=np.uint64)
    for k in range(bits):
        on = ((idx >> np.uint64(k)) & np.uint64(1)).astype(bool)
        x[:, on] ^= V[:, k : k + 1]
    return x.astype(np.float64) / 2.0**FRACTION_BITS


@lru_cache(maxsize=8)
def _cached_default_matrix(num_sequences: int, num_points: int) -> np.ndarray:
    mat = sobol_matrix(default_table(), num_sequences, num_points)
    mat.setflags(write=False)
    return mat


def default_sobol_matrix(num_sequences: int, num_points: int) -> np.ndarray:
    """Read-only matrix from the bundled table, memoised for reuse across calls."""
    return _cached_default_matrix(num_sequences, num_points)
