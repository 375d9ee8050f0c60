import numpy as np
import pytest

from sobolhdc.classifier import (
    ClassModel,
    EncoderConfig,
    GeneratorSpec,
    ItemMemory,
    build_item_memory,
    classify,
    encode_ngram,
    encode_text,
    encode_texts,
    evaluate,
    load_model,
    memory_for_model,
    ngram_vectors,
    save_model,
    symbol_seed,
    threshold_grid,
    threshold_sweep,
    train,
)
from sobolhdc.corpus import ALPHABET, Dataset, LabeledText, split_per_class, synthetic_corpus
from sobolhdc.errors import CapacityError, EncodingError, IncompatibleModelError, TrainingError
from sobolhdc.hypervector import bind, random_hypervector, rotate, sign_threshold
from sobolhdc.similarity import cosine, scc_range_monitor


def hand_memory(vectors, symbols="ab"):
    vecs = np.array(vectors, dtype=np.int8)
    return ItemMemory(tuple(symbols), vecs, GeneratorSpec("random"), 0.5, vecs.shape[1])


def small_memory(source="random", dim=256, T=0.5, seed=0):
    return build_item_memory(ALPHABET, GeneratorSpec(source, seed=seed, sobol_pick="first"), EncoderConfig(4, dim, T))


def disjoint_dataset(seed, per_class=20):
    return synthetic_corpus(2, per_class, 50, seed=seed, separation=1.0)


# -- configuration -------------------------------------------------------------

@pytest.mark.parametrize("kw", [{"n": 0}, {"dim": 8}, {"T": 1.5}])
def test_encoder_config_validation(kw):
    with pytest.raises(ValueError):
        EncoderConfig(**kw)


@pytest.mark.parametrize("kw", [{"source": "qrng"}, {"sobol_pick": "best"}, {"lfsr_mode": "both"}])
def test_generator_spec_validation(kw):
    with pytest.raises(ValueError):
        GeneratorSpec(**kw)


# -- item memory ---------------------------------------------------------------

def test_sobol_memory_uses_selected_indexes(table):
    mem = build_item_memory(ALPHABET, GeneratorSpec("sobol"), EncoderConfig(4, 8192, 0.38), table)
    assert mem.vectors.shape == (28, 8192)
    assert len(set(mem.indexes)) == 28


def test_sobol_first_pick(table):
    mem = build_item_memory(ALPHABET, GeneratorSpec("sobol", sobol_pick="first"), EncoderConfig(4, 64, 0.5), table)
    assert mem.indexes == list(range(1, 29))


def test_random_memory_reproducible():
    spec, cfg = GeneratorSpec("random", seed=5), EncoderConfig(4, 64, 0.5)
    a = build_item_memory("xy", spec, cfg)
    b = build_item_memory("xy", spec, cfg)
    assert np.array_equal(a.vectors, b.vectors) and a.fingerprint == b.fingerprint
    assert np.array_equal(a.vectors[1], random_hypervector(64, 0.5, symbol_seed(5, 1)))


@pytest.mark.parametrize("mode", ["per-symbol", "shared"])
def test_lfsr_memory(mode):
    mem = build_item_memory(ALPHABET, GeneratorSpec("lfsr", lfsr_mode=mode), EncoderConfig(4, 8192, 0.5))
    assert mem.vectors.shape == (28, 8192)
    report = scc_range_monitor(mem.vectors)
    assert -1 <= report.min_scc <= report.max_scc <= 1


def test_sobol_capacity():
    symbols = [f"s{i}" for i in range(1112)]
    with pytest.raises(CapacityError):
        build_item_memory(symbols, GeneratorSpec("sobol", sobol_pick="first"), EncoderConfig(1, 16, 0.5))


def test_unknown_symbol_named():
    with pytest.raises(EncodingError, match="'!'"):
        small_memory().ids("ab!")


# -- encoding ------------------------------------------------------------------

def test_ngram_examples():
    mem = hand_memory([[1, -1, 1, -1], [1, 1, -1, -1]])
    assert encode_ngram("a", mem).tolist() == [1, -1, 1, -1]
    assert encode_ngram("ab", mem).tolist() == [-1, -1, 1, 1]


def test_ngram_repeated_symbol():
    mem = small_memory(dim=64)
    v = mem.vector("q")
    expected = bind(bind(v, rotate(v, 1)), bind(rotate(v, 2), rotate(v, 3)))
    assert np.array_equal(encode_ngram("qqqq", mem), expected)
    assert np.array_equal(encode_ngram("qqqq", mem), encode_ngram("qqqq", mem))


def test_text_of_length_n_is_its_ngram():
    mem = small_memory(dim=64)
    cfg = EncoderConfig(4, 64, 0.5)
    assert np.array_equal(encode_text("abcd", mem, cfg), encode_ngram("abcd", mem))


def test_window_count():
    mem = small_memory(dim=64)
    assert ngram_vectors("hello world", mem, 4).shape == (8, 64)


def test_text_too_short():
    with pytest.raises(EncodingError):
        encode_text("abc", small_memory(dim=64), EncoderConfig(4, 64, 0.5))


def test_batch_matches_single():
    mem = small_memory(dim=128)
    cfg = EncoderConfig(4, 128, 0.5)
    texts = ["hello world", "abcd", "the quick brown fox", "zzzzzz", "hello there"]
    batch = encode_texts(texts, mem, cfg, chunk_bytes=1)
    for row, t in zip(batch, texts):
        assert np.array_equal(row, encode_text(t, mem, cfg))


# -- training and inference ----------------------------------------------------

def test_one_text_model():
    mem, cfg = small_memory(dim=64), EncoderConfig(4, 64, 0.5)
    model = train([LabeledText("x", "some text here")], mem, cfg)
    assert np.array_equal(model.class_vectors[0], encode_text("some text here", mem, cfg))
    assert classify("some text here", model, mem).label == "x"


def test_accumulators_are_sums_of_text_vectors():
    mem, cfg = small_memory(dim=128), EncoderConfig(4, 128, 0.5)
    ds = synthetic_corpus(3, 6, 20, seed=2)
    model = train(ds, mem, cfg)
    for c, label in enumerate(model.labels):
        expect = sum(encode_text(it.symbols, mem, cfg).astype(np.int64) for it in ds if it.label == label)
        assert np.array_equal(model.accumulators[c], expect)
        assert np.array_equal(model.class_vectors[c], sign_threshold(model.accumulators[c]))


def test_duplicated_training_set_same_model():
    mem, cfg = small_memory(dim=128), EncoderConfig(4, 128, 0.5)
    ds = synthetic_corpus(3, 6, 20, seed=2)
    doubled = Dataset(ds.items * 3)
    assert np.array_equal(train(ds, mem, cfg).class_vectors, train(doubled, mem, cfg).class_vectors)


def test_training_is_deterministic():
    ds = synthetic_corpus(3, 6, 20, seed=2)
    cfg = EncoderConfig(4, 128, 0.5)
    a = train(ds, small_memory(dim=128, seed=4), cfg)
    b = train(ds, small_memory(dim=128, seed=4), cfg)
    assert np.array_equal(a.accumulators, b.accumulators)


def test_empty_class_rejected():
    mem, cfg = small_memory(dim=64), EncoderConfig(4, 64, 0.5)
    with pytest.raises(TrainingError):
        train([LabeledText("x", "abcdef")], mem, cfg, labels=["x", "y"])
    with pytest.raises(TrainingError):
        train([], mem, cfg)


def test_disjoint_classes_nearly_orthogonal():
    D = 1024
    cosines = []
    for seed in range(20):
        mem = small_memory(dim=D, seed=seed)
        model = train(disjoint_dataset(seed), mem, EncoderConfig(4, D, 0.5))
        cosines.append(cosine(model.class_vectors[0], model.class_vectors[1]))
    assert sum(abs(c) <= 3 / np.sqrt(D) for c in cosines) >= 19


@pytest.mark.parametrize("D", [256, 1024])
def test_disjoint_classes_perfect_accuracy(D):
    tr, te = split_per_class(disjoint_dataset(7, 40), 10)
    mem = small_memory(dim=D, seed=7)
    cfg = EncoderConfig(4, D, 0.5)
    ev = evaluate(te, train(tr, mem, cfg), mem)
    assert ev.accuracy == 1.0
    assert ev.confusion.sum() == len(te) and len(ev.predictions) == len(te)


def test_scores_per_class_and_tie_order():
    mem, cfg = small_memory(dim=64), EncoderConfig(4, 64, 0.5)
    model = train([LabeledText("x", "abcdefg"), LabeledText("y", "abcdefg")], mem, cfg)
    p = classify("abcdefg", model, mem)
    assert list(p.scores) == ["x", "y"] and p.label == "x"


def test_accumulator_scoring_option():
    mem, cfg = small_memory(dim=256), EncoderConfig(4, 256, 0.5)
    tr, te = split_per_class(disjoint_dataset(1, 30), 10)
    model = train(tr, mem, cfg)
    assert evaluate(te, model, mem, use_accumulators=True).accuracy == 1.0


def test_fingerprint_mismatch():
    cfg = EncoderConfig(4, 64, 0.5)
    model = train([LabeledText("x", "abcdefg")], small_memory(dim=64, seed=1), cfg)
    with pytest.raises(IncompatibleModelError):
        classify("abcdefg", model, small_memory(dim=64, seed=2))
    other = build_item_memory(ALPHABET[:-1] + ("!",), GeneratorSpec("random", seed=1), cfg)
    with pytest.raises(IncompatibleModelError):
        classify("abcdefg", model, other)


def test_accuracy_grows_with_dimension():
    means = []
    for D in (16, 64, 256, 1024):
        accs = []
        for r in range(10):
            tr, te = split_per_class(synthetic_corpus(seed=r), 50)
            mem = small_memory(dim=D, seed=r)
            cfg = EncoderConfig(4, D, 0.5)
            accs.append(evaluate(te, train(tr, mem, cfg), mem).accuracy)
        means.append(np.mean(accs))
    inversions = sum(b < a for a, b in zip(means, means[1:]))
    assert inversions <= 1, means


# -- sweep ---------------------------------------------------------------------

def test_threshold_grid():
    g = threshold_grid()
    assert len(g) == 49 and g[0] == 0.02 and g[-1] == 0.98


def test_sweep_curve_and_best():
    tr, te = split_per_class(synthetic_corpus(3, 30, 40, seed=0), 10)
    res = threshold_sweep(tr, te, dim=64, grid=[0.1, 0.3, 0.5, 0.7])
    assert len(res.accuracies) == 4 and not any(np.isnan(res.accuracies))
    assert res.best_accuracy == max(res.accuracies)
    assert res.accuracies[res.best_index] == res.best_accuracy
    again = threshold_sweep(tr, te, dim=64, grid=[0.1, 0.3, 0.5, 0.7])
    assert again.accuracies == res.accuracies


def test_sweep_plateau_split_by_margin():
    from sobolhdc.classifier import SweepResult

    r = SweepResult([0.2, 0.3, 0.4], [1.0, 1.0, 0.9], [0.05, 0.08, 0.2])
    assert r.best_T == 0.3
    assert SweepResult([0.2, 0.3], [0.5, 0.5]).best_T == 0.2


def test_sweep_rejects_endpoints():
    tr, te = split_per_class(synthetic_corpus(2, 5, 10), 2)
    with pytest.raises(ValueError):
        threshold_sweep(tr, te, dim=64, grid=[0.0, 0.5])


# -- model file ----------------------------------------------------------------

def test_model_roundtrip(tmp_path):
    mem, cfg = small_memory(dim=100, seed=3), EncoderConfig(4, 100, 0.5)
    model = train(synthetic_corpus(3, 5, 20, seed=1), mem, cfg)
    path = tmp_path / "m.hdcm"
    save_model(path, model)
    back = load_model(path)
    assert back.labels == model.labels and back.config == model.config
    assert np.array_equal(back.class_vectors, model.class_vectors)
    assert np.array_equal(back.accumulators, model.accumulators)
    rebuilt = memory_for_model(back)
    assert rebuilt.fingerprint == mem.fingerprint
    assert classify("hello there", back, rebuilt).label == classify("hello there", model, mem).label


def test_model_file_rejects_garbage(tmp_path):
    p = tmp_path / "junk"
    p.write_bytes(b"not a model")
    with pytest.raises(ValueError):
        load_model(p)


def test_model_overflow_guard(tmp_path):
    model = ClassModel(["x"], np.array([[2**31]]), np.array([[1]], np.int8), EncoderConfig(1, 16, 0.5), "f")
    with pytest.raises(OverflowError):
        save_model(tmp_path / "m", model)
