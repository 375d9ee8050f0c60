"""Text corpora reduced to a 28-symbol alphabet.

Letters a-z map to themselves (ASCII upper case is lowered), any run of
whitespace becomes one space, and every other character becomes the single
catch-all symbol ``EXTRA``.
"""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

LETTERS = "abcdefghijklmnopqrstuvwxyz"
SPACE = " "
EXTRA = "#"
ALPHABET: tuple[str, ...] = tuple(LETTERS) + (SPACE, EXTRA)


@dataclass(frozen=True)
class LabeledText:
    label: str
    symbols: str


@dataclass
class Dataset:
    items: list[LabeledText]
    alphabet: tuple[str, ...] = ALPHABET
    split: str = "train"

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    @property
    def labels(self) -> list[str]:
        """Distinct labels in order of first appearance."""
        return list(dict.fromkeys(item.label for item in self.items))

    def by_label(self) -> dict[str, list[LabeledText]]:
        groups: dict[str, list[LabeledText]] = {}
        for item in self.items:
            groups.setdefault(item.label, []).append(item)
        return groups


def normalize_text(raw: str) -> str:
    out: list[str] = []
    for ch in raw:
        if "a" <= ch <= "z":
            out.append(ch)
        elif "A" <= ch <= "Z":
            out.append(ch.lower())
        elif ch.isspace():
            if not out or out[-1] != SPACE:
                out.append(SPACE)
        else:
            out.append(EXTRA)
    return "".join(out)


def load_language_corpus(
    directory, granularity: str = "line", split: str = "train", min_length: int = 1
) -> Dataset:
    """One ``<label>.txt`` file per class; one item per non-empty line or per file."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {directory}")
    if granularity not in ("line", "file"):
        raise ValueError("granularity must be 'line' or 'file'")
    files = sorted(directory.glob("*.txt"))
    if not files:
        raise FileNotFoundError(f"no .txt files in {directory}")
    items: list[LabeledText] = []
    for path in files:
        text = path.read_text(encoding="utf-8", errors="replace")
        chunks = text.splitlines() if granularity == "line" else [text]
        found = [normalize_text(c) for c in chunks if c.strip()]
        found = [s for s in found if len(s) >= min_length]
        if not found:
            raise ValueError(f"class file {path.name} has no usable text")
        items.extend(LabeledText(path.stem, s) for s in found)
    return Dataset(items, ALPHABET, split)


def _read_headline_rows(path: Path):
    if path.suffix in (".jsonl", ".json", ".ndjson"):
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                row = json.loads(line)
                if "headline" not in row or "category" not in row:
                    raise ValueError(f"{path}:{lineno}: missing 'headline' or 'category'")
                yield row["headline"], row["category"]
    else:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                return
            names = [h.strip().lower() for h in header]
            if "headline" in names and "category" in names:
                hi, ci = names.index("headline"), names.index("category")
            else:
                raise ValueError(f"{path}: expected 'headline' and 'category' columns")
            for row in reader:
                if len(row) > max(hi, ci):
                    yield row[hi], row[ci]


def load_headline_csv(
    path,
    classes=("entertainment", "politics", "parenting"),
    train_cap: int = 3400,
    test_cap: int = 1000,
) -> tuple[Dataset, Dataset]:
    """Headline/category records -> (train, test), first ``train_cap`` per class to train.

    Categories are matched case-insensitively; rows of other categories are skipped.
    """
    path = Path(path)
    wanted = [c.lower() for c in classes]
    train: dict[str, list[LabeledText]] = {c: [] for c in wanted}
    test: dict[str, list[LabeledText]] = {c: [] for c in wanted}
    for headline, category in _read_headline_rows(path):
        label = str(category).strip().lower()
        if label not in train:
            continue
        item = LabeledText(label, normalize_text(headline.strip()))
        if not item.symbols:
            continue
        if len(train[label]) < train_cap:
            train[label].append(item)
        elif len(test[label]) < test_cap:
            test[label].append(item)
    for label in wanted:
        if len(train[label]) < train_cap or len(test[label]) < test_cap:
            log.warning(
                "class %r has %d train / %d test headlines (caps %d / %d)",
                label, len(train[label]), len(test[label]), train_cap, test_cap,
            )
    flat = lambda groups: [it for c in wanted for it in groups[c]]  # noqa: E731
    return Dataset(flat(train), ALPHABET, "train"), Dataset(flat(test), ALPHABET, "test")


def synthetic_corpus(
    num_classes: int = 5,
    texts_per_class: int = 250,
    text_length: int = 60,
    seed: int = 0,
    separation: float = 0.6,
    vocab_size: int = 60,
) -> Dataset:
    """Language-like texts: space-separated words from class and shared vocabularies.

    There is one shared vocabulary spelled with all 26 letters, and one
    vocabulary per class spelled only with that class's contiguous block of
    letters. Each word of a class-``c`` text comes from class ``c``'s
    vocabulary with probability ``separation`` and from the shared one
    otherwise; within a vocabulary, word ``r`` has Zipf weight ``1/r``. So
    ``separation=1`` gives classes over disjoint alphabets and ``0`` gives
    identically distributed classes. Words are 2 to 8 letters long and texts
    are cut to ``text_length`` symbols.
    """
    if not 0.0 <= separation <= 1.0:
        raise ValueError("separation must lie in [0, 1]")
    if not 1 <= num_classes <= len(LETTERS):
        raise ValueError(f"num_classes must lie in [1, {len(LETTERS)}]")
    if texts_per_class < 1 or text_length < 1 or vocab_size < 1:
        raise ValueError("texts_per_class, text_length and vocab_size must be positive")
    rng = np.random.default_rng(seed)
    letters = np.array(list(LETTERS))

    def vocabulary(pool):
        return ["".join(letters[rng.choice(pool, size=rng.integers(2, 9))]) for _ in range(vocab_size)]

    zipf = 1.0 / np.arange(1, vocab_size + 1)
    zipf /= zipf.sum()
    shared = vocabulary(np.arange(len(LETTERS)))
    items: list[LabeledText] = []
    for c, block in enumerate(np.array_split(np.arange(len(LETTERS)), num_classes)):
        own = vocabulary(block)
        for _ in range(texts_per_class):
            words, length = [], 0
            while length <= text_length:
                source = own if rng.random() < separation else shared
                word = source[rng.choice(vocab_size, p=zipf)]
                words.append(word)
                length += len(word) + 1
            items.append(LabeledText(f"class{c}", " ".join(words)[:text_length]))
    return Dataset(items, ALPHABET, "train")


def split_per_class(dataset: Dataset, n_test: int) -> tuple[Dataset, Dataset]:
    """Hold out the last ``n_test`` items of every class."""
    train, test = [], []
    for items in dataset.by_label().values():
        if len(items) <= n_test:
            raise ValueError("not enough items to hold out a test set")
        train.extend(items[:-n_test])
        test.extend(items[-n_test:])
    return Dataset(train, dataset.alphabet, "train"), Dataset(test, dataset.alphabet, "test")


def write_corpus_dir(dataset: Dataset, directory) -> Path:
    """Write ``<label>.txt`` files with one item per line (inverse of the line loader)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for label, items in dataset.by_label().items():
        (directory / f"{label}.txt").write_text(
            "\n".join(it.symbols for it in items) + "\n", encoding="utf-8"
        )
    return directory
