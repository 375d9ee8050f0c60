"""n-gram HDC text classifier.

Each symbol gets a hypervector from an item memory. An n-gram is the bind of
its symbols' vectors, the symbol at window position ``p`` rotated by ``p``. A
text vector is the sign of the sum of all its n-grams; a class vector is the
sign of the sum of its training texts' vectors. Inference picks the class with
the highest cosine similarity.
"""
from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from sobolhdc.corpus import ALPHABET, Dataset, LabeledText
from sobolhdc.errors import (
    CapacityError,
    EncodingError,
    IncompatibleModelError,
    TrainingError,
)
from sobolhdc.hypervector import (
    LfsrConfig,
    lfsr_sequence,
    lfsr_width_for,
    pack,
    random_hypervector,
    rotate,
    sign_threshold,
    threshold_encode,
    unpack,
)
from sobolhdc.selection import select_sobol_hypervectors
from sobolhdc.sobol import SobolDirectionTable, default_table, sobol_matrix

SOURCES = ("sobol", "lfsr", "random")
MODEL_MAGIC = b"HDCM"
MODEL_VERSION = 1


@dataclass(frozen=True)
class EncoderConfig:
    n: int = 4
    dim: int = 8192
    T: float = 0.5

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n-gram size must be >= 1")
        if self.dim < 16:
            raise ValueError("hypervector size must be >= 16")
        if not 0.0 <= self.T <= 1.0:
            raise ValueError("T must lie in [0, 1]")


@dataclass(frozen=True)
class GeneratorSpec:
    """How item-memory vectors are produced.

    ``sobol_pick`` is ``"optimized"`` (run the SCC selection) or ``"first"``
    (dimensions 1..K, as used for threshold pre-analysis). ``lfsr_mode`` is
    ``"per-symbol"`` (same polynomial, independent random seed per symbol) or
    ``"shared"`` (one register stream cut into consecutive D-length chunks).
    """

    source: str = "sobol"
    seed: int = 0
    sobol_pick: str = "optimized"
    strategy: str = "column"
    lfsr_mode: str = "per-symbol"

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}; expected one of {SOURCES}")
        if self.sobol_pick not in ("optimized", "first"):
            raise ValueError("sobol_pick must be 'optimized' or 'first'")
        if self.lfsr_mode not in ("per-symbol", "shared"):
            raise ValueError("lfsr_mode must be 'per-symbol' or 'shared'")


@dataclass
class ItemMemory:
    symbols: tuple[str, ...]
    vectors: np.ndarray  # K x D int8
    spec: GeneratorSpec
    T: float
    dim: int
    indexes: list[int] | None = None  # Sobol dimensions, when source is sobol
    _lookup: dict = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.vectors.shape != (len(self.symbols), self.dim):
            raise ValueError("one vector of size dim is needed per symbol")
        self._lookup = {s: i for i, s in enumerate(self.symbols)}

    @property
    def source(self) -> str:
        return self.spec.source

    @property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update("\x1f".join(self.symbols).encode())
        h.update(struct.pack("<I", self.dim))
        h.update(pack(self.vectors).tobytes())
        return h.hexdigest()[:16]

    def ids(self, text) -> np.ndarray:
        try:
            return np.fromiter((self._lookup[s] for s in text), dtype=np.intp, count=len(text))
        except KeyError as exc:
            raise EncodingError(f"symbol {exc.args[0]!r} is not in the item memory") from None

    def vector(self, symbol: str) -> np.ndarray:
        return self.vectors[self.ids([symbol])[0]]


def symbol_seed(master_seed: int, counter: int) -> np.random.SeedSequence:
    """Seed for the ``counter``-th draw under ``master_seed``: SeedSequence([master, counter])."""
    return np.random.SeedSequence([master_seed, counter])


def build_item_memory(
    symbols=ALPHABET,
    spec: GeneratorSpec | str = "sobol",
    config: EncoderConfig = EncoderConfig(),
    table: SobolDirectionTable | None = None,
) -> ItemMemory:
    symbols = tuple(symbols)
    if isinstance(spec, str):
        spec = GeneratorSpec(source=spec)
    K, D, T = len(symbols), config.dim, config.T
    if K < 1:
        raise ValueError("the alphabet is empty")
    indexes = None
    if spec.source == "sobol":
        table = table or default_table()
        if K > table.max_dimensions:
            raise CapacityError(f"{K} symbols exceed the {table.max_dimensions} Sobol sequences")
        if spec.sobol_pick == "first":
            indexes = list(range(1, K + 1))
            vectors = threshold_encode(sobol_matrix(table, K, D), T)
        else:
            if K < 2:
                raise ValueError("optimized selection needs at least two symbols")
            result = select_sobol_hypervectors(table, D, T, K, strategy=spec.strategy)
            indexes, vectors = result.indexes, result.hypervectors
    elif spec.source == "random":
        vectors = np.stack([random_hypervector(D, T, symbol_seed(spec.seed, i)) for i in range(K)])
    else:
        width = lfsr_width_for(D)
        rng = np.random.default_rng(symbol_seed(spec.seed, 0))
        if spec.lfsr_mode == "per-symbol":
            seeds = rng.integers(1, 2**width, size=K)
            vectors = np.stack(
                [threshold_encode(lfsr_sequence(LfsrConfig.maximal(width, int(s)), D), T) for s in seeds]
            )
        else:
            start = int(rng.integers(1, 2**width))
            stream = lfsr_sequence(LfsrConfig.maximal(width, start), K * D)
            vectors = threshold_encode(stream.reshape(K, D), T)
    return ItemMemory(symbols, vectors.astype(np.int8), spec, T, D, indexes)


def encode_ngram(gram, memory: ItemMemory) -> np.ndarray:
    ids = memory.ids(gram)
    if len(ids) == 0:
        raise EncodingError("empty n-gram")
    out = memory.vectors[ids[0]].copy()
    for p in range(1, len(ids)):
        out *= rotate(memory.vectors[ids[p]], p)
    return out


def ngram_vectors(text, memory: ItemMemory, n: int) -> np.ndarray:
    """All sliding-window n-gram vectors of ``text`` (stride 1), one per row."""
    if len(text) < n:
        raise EncodingError(f"text of length {len(text)} is shorter than the n-gram size {n}")
    V = memory.vectors[memory.ids(text)]
    count = len(text) - n + 1
    G = V[:count].copy()
    for p in range(1, n):
        G *= np.roll(V[p : p + count], p, axis=1)
    return G


def text_sums(text, memory: ItemMemory, config: EncoderConfig) -> np.ndarray:
    return ngram_vectors(text, memory, config.n).sum(axis=0, dtype=np.int64)


def encode_text(text, memory: ItemMemory, config: EncoderConfig) -> np.ndarray:
    return sign_threshold(text_sums(text, memory, config))


def encode_texts(texts, memory: ItemMemory, config: EncoderConfig, chunk_bytes: int = 64 << 20) -> np.ndarray:
    """Text vectors for many texts at once (one row each); same result as :func:`encode_text`.

    Texts of equal length are encoded together in chunks bounded by ``chunk_bytes``.
    """
    texts = list(texts)
    n, D = config.n, memory.dim
    out = np.empty((len(texts), D), dtype=np.int8)
    by_length: dict[int, list[int]] = {}
    for i, t in enumerate(texts):
        if len(t) < n:
            raise EncodingError(f"text of length {len(t)} is shorter than the n-gram size {n}")
        by_length.setdefault(len(t), []).append(i)
    for L, rows in by_length.items():
        count = L - n + 1
        step = max(1, chunk_bytes // (L * D))
        for start in range(0, len(rows), step):
            batch = rows[start : start + step]
            ids = np.stack([memory.ids(texts[i]) for i in batch])
            V = memory.vectors[ids]  # B x L x D
            G = V[:, :count].copy()
            for p in range(1, n):
                G *= np.roll(V[:, p : p + count], p, axis=2)
            out[batch] = sign_threshold(G.sum(axis=1, dtype=np.int32))
    return out


@dataclass
class ClassModel:
    labels: list[str]
    accumulators: np.ndarray  # C x D int64
    class_vectors: np.ndarray  # C x D int8
    config: EncoderConfig
    item_memory_fingerprint: str
    generator: dict = field(default_factory=dict)


def _texts(dataset) -> list[LabeledText]:
    return list(dataset.items if isinstance(dataset, Dataset) else dataset)


def train(dataset, memory: ItemMemory, config: EncoderConfig, labels=None) -> ClassModel:
    """Single pass: every text vector is added to its class accumulator once."""
    items = _texts(dataset)
    labels = list(labels) if labels is not None else list(dict.fromkeys(it.label for it in items))
    if not labels:
        raise TrainingError("no training data")
    row = {lab: i for i, lab in enumerate(labels)}
    acc = np.zeros((len(labels), memory.dim), dtype=np.int64)
    for it in items:
        if it.label not in row:
            raise TrainingError(f"label {it.label!r} not among the declared labels")
    targets = np.array([row[it.label] for it in items], dtype=np.intp)
    if items:
        np.add.at(acc, targets, encode_texts([it.symbols for it in items], memory, config))
    seen = np.bincount(targets, minlength=len(labels))
    empty = [lab for lab, c in zip(labels, seen) if c == 0]
    if empty:
        raise TrainingError(f"classes without training texts: {empty}")
    return ClassModel(
        labels,
        acc,
        sign_threshold(acc),
        config,
        memory.fingerprint,
        {**asdict(memory.spec), "indexes": memory.indexes},
    )


@dataclass
class Prediction:
    label: str
    scores: dict[str, float]


def _check_compatible(model: ClassModel, memory: ItemMemory) -> None:
    if model.item_memory_fingerprint != memory.fingerprint:
        raise IncompatibleModelError(
            f"model was trained with item memory {model.item_memory_fingerprint}, "
            f"got {memory.fingerprint}"
        )


def _score_matrix(model: ClassModel, use_accumulators: bool) -> np.ndarray:
    if use_accumulators:
        A = model.accumulators.astype(np.float64)
        norms = np.linalg.norm(A, axis=1, keepdims=True)
        return A / np.where(norms == 0, 1.0, norms)
    return model.class_vectors.astype(np.float64) / np.sqrt(model.config.dim)


def classify(text, model: ClassModel, memory: ItemMemory, use_accumulators: bool = False) -> Prediction:
    """Nearest class by cosine; ties go to the first label.

    ``use_accumulators`` compares against the raw class sums (diagnostics only).
    """
    _check_compatible(model, memory)
    q = encode_text(text, memory, model.config).astype(np.float64) / np.sqrt(model.config.dim)
    scores = _score_matrix(model, use_accumulators) @ q
    best = int(np.argmax(scores))
    return Prediction(model.labels[best], dict(zip(model.labels, scores.tolist())))


@dataclass
class Evaluation:
    accuracy: float
    confusion: np.ndarray  # rows: true label, columns: predicted
    labels: list[str]
    predictions: list[str]
    margin: float = 0.0  # mean cosine of the true class minus the best other class


def evaluate(testset, model: ClassModel, memory: ItemMemory, use_accumulators: bool = False) -> Evaluation:
    items = _texts(testset)
    if not items:
        raise ValueError("empty test set")
    _check_compatible(model, memory)
    row = {lab: i for i, lab in enumerate(model.labels)}
    W = _score_matrix(model, use_accumulators)
    confusion = np.zeros((len(model.labels), len(model.labels)), dtype=np.int64)
    preds = []
    for it in items:
        if it.label not in row:
            raise ValueError(f"test label {it.label!r} was not seen in training")
    Q = encode_texts([it.symbols for it in items], memory, model.config).astype(np.float64)
    S = (Q @ W.T) / np.sqrt(model.config.dim)
    best = np.argmax(S, axis=1)
    for it, b in zip(items, best.tolist()):
        confusion[row[it.label], b] += 1
        preds.append(model.labels[b])
    truth = np.array([row[it.label] for it in items])
    true_score = S[np.arange(len(items)), truth]
    if S.shape[1] > 1:
        S[np.arange(len(items)), truth] = -np.inf
        margin = float(np.mean(true_score - S.max(axis=1)))
    else:
        margin = 0.0
    return Evaluation(float(np.trace(confusion) / len(items)), confusion, list(model.labels), preds, margin)


@dataclass
class SweepResult:
    thresholds: list[float]
    accuracies: list[float]
    margins: list[float] | None = None

    @property
    def best_index(self) -> int:
        """Highest accuracy; a plateau is split by the mean margin, then by the smaller T."""
        margins = self.margins if self.margins is not None else [0.0] * len(self.accuracies)
        keys = [(-a, -m, i) for i, (a, m) in enumerate(zip(self.accuracies, margins))]
        return min(keys)[2]

    @property
    def best_T(self) -> float:
        return self.thresholds[self.best_index]

    @property
    def best_accuracy(self) -> float:
        return float(np.max(self.accuracies))


def threshold_grid(step: float = 0.02) -> list[float]:
    """Interior points of [0, 1] at the given step (endpoints give constant vectors)."""
    count = int(round(1.0 / step))
    return [round(i * step, 10) for i in range(1, count)]


def threshold_sweep(
    train_set,
    validation_set,
    spec: GeneratorSpec | str = GeneratorSpec(sobol_pick="first"),
    dim: int = 1024,
    grid=None,
    n: int = 4,
    symbols=ALPHABET,
    table: SobolDirectionTable | None = None,
) -> SweepResult:
    """Accuracy on ``validation_set`` for each T, rebuilding the item memory every time."""
    grid = threshold_grid() if grid is None else list(grid)
    if any(not 0.0 < T < 1.0 for T in grid):
        raise ValueError("sweep thresholds must lie strictly inside (0, 1)")
    accs, margins = [], []
    for T in grid:
        config = EncoderConfig(n=n, dim=dim, T=T)
        memory = build_item_memory(symbols, spec, config, table)
        model = train(train_set, memory, config)
        ev = evaluate(validation_set, model, memory)
        accs.append(ev.accuracy)
        margins.append(ev.margin)
    return SweepResult(list(grid), accs, margins)


def save_model(path, model: ClassModel) -> Path:
    """Header JSON, then bit-packed class vectors, then little-endian int32 accumulators."""
    path = Path(path)
    C, D = model.class_vectors.shape
    if np.abs(model.accumulators).max(initial=0) >= 2**31:
        raise OverflowError("accumulator values do not fit in int32")
    header = {
        "labels": model.labels,
        "D": model.config.dim,
        "n": model.config.n,
        "T": model.config.T,
        "source": model.generator.get("source"),
        "item_memory_fingerprint": model.item_memory_fingerprint,
        "generator": model.generator,
    }
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<HI", MODEL_VERSION, len(blob)))
        fh.write(blob)
        fh.write(pack(model.class_vectors).tobytes())
        fh.write(model.accumulators.astype("<i4").tobytes())
    return path


def load_model(path) -> ClassModel:
    raw = Path(path).read_bytes()
    if raw[:4] != MODEL_MAGIC:
        raise ValueError(f"{path} is not a model file")
    version, hlen = struct.unpack_from("<HI", raw, 4)
    if version != MODEL_VERSION:
        raise ValueError(f"unsupported model version {version}")
    offset = 4 + struct.calcsize("<HI")
    header = json.loads(raw[offset : offset + hlen])
    offset += hlen
    C, D = len(header["labels"]), header["D"]
    row_bytes = (D + 7) // 8
    packed = np.frombuffer(raw, dtype=np.uint8, count=C * row_bytes, offset=offset).reshape(C, row_bytes)
    offset += C * row_bytes
    acc = np.frombuffer(raw, dtype="<i4", count=C * D, offset=offset).reshape(C, D).astype(np.int64)
    config = EncoderConfig(n=header["n"], dim=D, T=header["T"])
    return ClassModel(
        list(header["labels"]), acc, unpack(packed, D), config,
        header["item_memory_fingerprint"], header.get("generator", {}),
    )


def memory_for_model(model: ClassModel, symbols=ALPHABET, table=None) -> ItemMemory:
    """Rebuild the item memory a saved model was trained with."""
    g = dict(model.generator)
    spec = GeneratorSpec(**{k: g[k] for k in ("source", "seed", "sobol_pick", "strategy", "lfsr_mode") if k in g})
    return build_item_memory(symbols, spec, model.config, table)
