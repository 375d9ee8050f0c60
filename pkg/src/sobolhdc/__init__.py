"""Sobol-sequence hypervectors and an n-gram HDC text classifier."""
from sobolhdc.classifier import (
    ClassModel,
    EncoderConfig,
    GeneratorSpec,
    ItemMemory,
    build_item_memory,
    classify,
    encode_text,
    encode_texts,
    evaluate,
    load_model,
    save_model,
    threshold_sweep,
    train,
)
from sobolhdc.corpus import ALPHABET, Dataset, LabeledText, synthetic_corpus
from sobolhdc.hypervector import (
    bind,
    generate_sobol_hypervectors,
    lfsr_hypervector,
    load_hypervectors,
    random_hypervector,
    rotate,
    save_hypervectors,
    sign_threshold,
    threshold_encode,
)
from sobolhdc.selection import select_sobol_hypervectors
from sobolhdc.similarity import cosine, hamming, scc, scc_range_monitor
from sobolhdc.sobol import default_table, load_table, parse_direction_file, sobol_dimension, sobol_matrix

__version__ = "0.1.0"
