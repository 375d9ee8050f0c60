"""Command-line front end: ``sobolhdc <verb> [flags]``.

Every verb accepts ``--config FILE.json`` whose keys mirror the long flags
(dashes or underscores); flags given on the command line win. Tabular output is
CSV with a single header line; when written to a file, the resolved config goes
to a ``<out>.json`` sidecar. Exit status: 0 on success, 2 on usage errors, 1
when a command fails.

Seeds: one master ``--seed``. Trial ``r`` of ``eval`` uses generator seed
``trial_seed(seed, r)``; symbol ``i`` inside a generator uses
``SeedSequence([generator_seed, i])``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from sobolhdc.classifier import (
    SOURCES,
    EncoderConfig,
    GeneratorSpec,
    build_item_memory,
    classify,
    encode_texts,
    evaluate,
    load_model,
    memory_for_model,
    save_model,
    threshold_grid,
    threshold_sweep,
    train,
)
from sobolhdc.corpus import (
    ALPHABET,
    Dataset,
    load_headline_csv,
    load_language_corpus,
    normalize_text,
    split_per_class,
    synthetic_corpus,
)
from sobolhdc.hypervector import HEADER, save_hypervectors
from sobolhdc.selection import STRATEGIES, select_sobol_hypervectors, write_report
from sobolhdc.sobol import (
    BUNDLED_TABLES,
    DEFAULT_TABLE,
    MAX_DIMENSIONS,
    load_table,
    sobol_matrix,
)

log = logging.getLogger("sobolhdc")


class UsageError(Exception):
    pass


def trial_seed(master: int, trial: int) -> int:
    """Generator seed for one eval trial, derived from the master seed."""
    return int(np.random.SeedSequence([master, trial]).generate_state(1, dtype=np.uint32)[0])


# -- argument handling ---------------------------------------------------------

def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _unit(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in [0, 1], got {text}")
    return value


def _common(p, *, dim=True, many_dims=False, t=True, source=True, data=False):
    if dim:
        if many_dims:
            p.add_argument("--dim", type=_positive, nargs="+", default=[1024], help="hypervector size(s)")
        else:
            p.add_argument("--dim", type=_positive, default=8192, help="hypervector size D")
    if t:
        p.add_argument("--t", type=_unit, default=0.5, help="threshold T")
    if source:
        p.add_argument("--source", choices=SOURCES, default="sobol")
    p.add_argument("--ngram", type=_positive, default=4, help="n-gram size")
    p.add_argument("--k", type=_positive, default=None, help="number of symbols / selected sequences")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--trials", type=_positive, default=1)
    p.add_argument("--direction-file", default=DEFAULT_TABLE,
                   help=f"direction file path or bundled table ({', '.join(BUNDLED_TABLES)})")
    p.add_argument("--strategy", choices=STRATEGIES, default="column", help="selection tie strategy")
    p.add_argument("--sobol-pick", choices=("optimized", "first"), default="optimized")
    p.add_argument("--lfsr-mode", choices=("per-symbol", "shared"), default="per-symbol")
    p.add_argument("--alphabet", default="".join(ALPHABET), help="symbols of the item memory")
    if data:
        p.add_argument("--data", default="synthetic",
                       help="'synthetic', a corpus directory, or a headline .json/.jsonl/.csv file")
        p.add_argument("--test-data", default=None, help="separate test corpus directory")
        p.add_argument("--granularity", choices=("line", "file"), default="line")
        p.add_argument("--corpus-seed", type=int, default=0, help="seed of the synthetic corpus")
    p.add_argument("--out", default=None, help="output path (stdout when omitted)")
    p.add_argument("--config", default=None, help="JSON file whose keys mirror these flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sobolhdc", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sobol", help="dump Sobol points as CSV, one row per dimension")
    p.add_argument("--dims", type=int, default=2)
    p.add_argument("--points", type=int, default=16)
    p.add_argument("--skip", type=int, default=0)
    p.add_argument("--direction-file", default=DEFAULT_TABLE)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)

    p = sub.add_parser("select", help="pick k weakly correlated Sobol sequences")
    _common(p, source=False)
    p.set_defaults(dim=2048, t=0.34, k=28)
    p.add_argument("--num-sequences", type=_positive, default=MAX_DIMENSIONS)
    p.add_argument("--save-hv", default=None, help="also write the selected hypervector set")

    p = sub.add_parser("sweep", help="validation accuracy over a T grid")
    _common(p, many_dims=True, t=False, data=True)
    p.set_defaults(sobol_pick="first")
    p.add_argument("--step", type=float, default=0.02, help="grid step over (0, 1)")
    p.add_argument("--svg", default=None, help="optional SVG plot of the curves")

    p = sub.add_parser("train", help="train a class model")
    _common(p, data=True)

    p = sub.add_parser("infer", help="classify texts with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--text", action="append", default=None, help="text to classify (repeatable)")
    p.add_argument("--input", default=None, help="file with one text per line")
    p.add_argument("--direction-file", default=None, help="override the table recorded in the model")
    p.add_argument("--alphabet", default="".join(ALPHABET))
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)

    p = sub.add_parser("eval", help="train and test, repeated over trials for seeded sources")
    _common(p, data=True)

    p = sub.add_parser("bench", help="encoding throughput and item-memory footprint")
    _common(p, many_dims=True, source=False)
    p.set_defaults(dim=[1024, 8192])
    p.add_argument("--sources", nargs="+", choices=SOURCES, default=list(SOURCES))
    p.add_argument("--texts", type=_positive, default=200, help="texts encoded per measurement")
    p.add_argument("--text-length", type=_positive, default=100)
    p.add_argument("--repeats", type=_positive, default=3)
    return parser


def _apply_config(parser, argv):
    """Parse once to find the verb and --config, then re-parse with file values as defaults."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    if not isinstance(cfg, dict):
        parser.error("config file must hold a JSON object")
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in subparser._actions}
    values = {}
    for key, value in cfg.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in known or dest in ("help", "config"):
            parser.error(f"unknown config key {key!r} for '{args.command}'")
        values[dest] = value
    subparser.set_defaults(**values)
    args = parser.parse_args(argv)
    # config values bypass argparse type checks; run the same converters
    for action in subparser._actions:
        if action.dest in values and action.type is not None and getattr(args, action.dest) == values[action.dest]:
            raw = values[action.dest]
            try:
                conv = [action.type(v) for v in raw] if isinstance(raw, list) else action.type(raw)
            except (argparse.ArgumentTypeError, ValueError, TypeError) as exc:
                parser.error(f"config key {action.dest}: {exc}")
            setattr(args, action.dest, conv)
        if action.dest in values and action.choices is not None:
            vals = values[action.dest] if isinstance(values[action.dest], list) else [values[action.dest]]
            if any(v not in action.choices for v in vals):
                parser.error(f"config key {action.dest}: expected one of {list(action.choices)}")
    return args


def resolved_config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("config", "verbose")}
    cfg["created"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return cfg


# -- output --------------------------------------------------------------------

def _emit_csv(args, header, rows, extra=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if args.out is None:
        sys.stdout.write(buf.getvalue())
        return
    out = Path(args.out)
    out.write_text(buf.getvalue())
    sidecar = {"config": resolved_config(args), **(extra or {})}
    Path(str(out) + ".json").write_text(json.dumps(sidecar, indent=2, default=str) + "\n")


def _fmt(x, digits=6):
    return f"{x:.{digits}f}" if isinstance(x, float) else x


# -- data ----------------------------------------------------------------------

def load_data(args) -> tuple[Dataset, Dataset]:
    src = args.data
    if src == "synthetic":
        return split_per_class(synthetic_corpus(seed=args.corpus_seed), 50)
    path = Path(src)
    if path.is_file():
        return load_headline_csv(path)
    if not path.is_dir():
        raise FileNotFoundError(f"data source {src!r} not found")
    if args.test_data:
        return (
            load_language_corpus(path, args.granularity, "train"),
            load_language_corpus(args.test_data, args.granularity, "test"),
        )
    if (path / "train").is_dir() and (path / "test").is_dir():
        return (
            load_language_corpus(path / "train", args.granularity, "train"),
            load_language_corpus(path / "test", args.granularity, "test"),
        )
    raise UsageError(f"{src} needs train/ and test/ subdirectories, or pass --test-data")


def _alphabet(args) -> tuple[str, ...]:
    symbols = tuple(args.alphabet)
    if len(set(symbols)) != len(symbols):
        raise UsageError("alphabet symbols must be distinct")
    return symbols


def _spec(args, seed=None) -> GeneratorSpec:
    return GeneratorSpec(
        source=args.source,
        seed=args.seed if seed is None else seed,
        sobol_pick=args.sobol_pick,
        strategy=args.strategy,
        lfsr_mode=args.lfsr_mode,
    )


def _check_k(args, symbols):
    if args.k is not None and args.k != len(symbols):
        raise UsageError(f"--k {args.k} does not match the {len(symbols)}-symbol alphabet")


# -- verbs ---------------------------------------------------------------------

def cmd_sobol(args):
    if args.dims < 1:
        raise UsageError("--dims must be at least 1")
    if args.points < 1:
        raise UsageError("--points must be at least 1")
    table = load_table(args.direction_file)
    mat = sobol_matrix(table, args.dims, args.points, skip=args.skip)
    header = ["dimension"] + [f"x{i}" for i in range(args.skip, args.skip + args.points)]
    rows = [[d + 1] + [repr(float(v)) for v in mat[d]] for d in range(args.dims)]
    _emit_csv(args, header, rows)


def cmd_select(args):
    if args.dim < 16:
        raise UsageError("--dim must be at least 16")
    table = load_table(args.direction_file)
    result = select_sobol_hypervectors(
        table, args.dim, args.t, args.k, num_sequences=min(args.num_sequences, table.max_dimensions),
        strategy=args.strategy,
    )
    report = result.report(args.dim, direction_file=str(args.direction_file))
    report["config"] = resolved_config(args)
    if args.save_hv:
        save_hypervectors(args.save_hv, result.hypervectors, {
            "D": args.dim, "T": args.t, "source": "sobol", "indexes": result.indexes,
            "direction_file": str(args.direction_file), "seed": None,
        })
    if args.out:
        write_report(args.out, report)
    else:
        print(json.dumps(report, indent=2))


def cmd_sweep(args):
    if not 0 < args.step < 1:
        raise UsageError("--step must lie in (0, 1)")
    symbols = _alphabet(args)
    _check_k(args, symbols)
    train_set, test_set = load_data(args)
    table = load_table(args.direction_file) if args.source == "sobol" else None
    grid = threshold_grid(args.step)
    rows, best = [], {}
    for D in args.dim:
        t0 = time.perf_counter()
        res = threshold_sweep(train_set, test_set, _spec(args), D, grid, args.ngram, symbols, table)
        log.info("D=%d swept in %.1fs, best T=%.2f", D, time.perf_counter() - t0, res.best_T)
        best[D] = {"T": res.best_T, "accuracy": res.best_accuracy}
        for i, (T, acc, margin) in enumerate(zip(res.thresholds, res.accuracies, res.margins)):
            rows.append([D, f"{T:.2f}", f"{acc:.6f}", f"{margin:.6f}", int(i == res.best_index)])
    _emit_csv(args, ["D", "T", "accuracy", "margin", "best"], rows, {"best": best})
    for D, b in best.items():
        print(f"# D={D} argmax T={b['T']:.2f} accuracy={b['accuracy']:.4f}", file=sys.stderr)
    if args.svg:
        _plot_sweep(rows, args.svg)


def _plot_sweep(rows, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3.5))
    for D in dict.fromkeys(r[0] for r in rows):
        pts = [(float(r[1]), float(r[2])) for r in rows if r[0] == D]
        ax.plot(*zip(*pts), label=f"D={D}")
    ax.set_xlabel("T")
    ax.set_ylabel("accuracy")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _fit(args, train_set, symbols, seed=None):
    config = EncoderConfig(n=args.ngram, dim=args.dim, T=args.t)
    table = load_table(args.direction_file) if args.source == "sobol" else None
    memory = build_item_memory(symbols, _spec(args, seed), config, table)
    model = train(train_set, memory, config)
    return model, memory


def cmd_train(args):
    symbols = _alphabet(args)
    _check_k(args, symbols)
    if args.out is None:
        raise UsageError("train needs --out for the model file")
    train_set, _ = load_data(args)
    model, memory = _fit(args, train_set, symbols)
    if args.source == "sobol":
        model.generator["direction_file"] = str(args.direction_file)
    save_model(args.out, model)
    Path(str(args.out) + ".json").write_text(json.dumps({
        "config": resolved_config(args), "labels": model.labels,
        "item_memory_fingerprint": memory.fingerprint, "indexes": memory.indexes,
    }, indent=2, default=str) + "\n")
    print(f"trained {len(model.labels)} classes, fingerprint {memory.fingerprint}", file=sys.stderr)


def cmd_infer(args):
    model = load_model(args.model)
    texts = list(args.text or [])
    if args.input:
        texts += [ln for ln in Path(args.input).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not texts:
        raise UsageError("give --text or --input")
    table = None
    if model.generator.get("source") == "sobol":
        table = load_table(args.direction_file or model.generator.get("direction_file"))
    memory = memory_for_model(model, _alphabet(args), table)
    rows = []
    for raw in texts:
        p = classify(normalize_text(raw), model, memory)
        rows.append([raw, p.label] + [f"{p.scores[lab]:.6f}" for lab in model.labels])
    _emit_csv(args, ["text", "label"] + [f"score_{lab}" for lab in model.labels], rows)


def cmd_eval(args):
    symbols = _alphabet(args)
    _check_k(args, symbols)
    train_set, test_set = load_data(args)
    if args.source == "sobol":
        model, memory = _fit(args, train_set, symbols)
        acc = evaluate(test_set, model, memory).accuracy
        rows = [["sobol", args.dim, args.t, args.ngram, 1, "", "", "", f"{acc:.6f}"]]
        extra = {"indexes": memory.indexes}
    else:
        accs = []
        for r in range(args.trials):
            model, memory = _fit(args, train_set, symbols, seed=trial_seed(args.seed, r))
            accs.append(evaluate(test_set, model, memory).accuracy)
            log.info("trial %d accuracy %.4f", r, accs[-1])
        a = np.array(accs)
        std = float(a.std(ddof=1)) if len(a) > 1 else 0.0
        rows = [[args.source, args.dim, args.t, args.ngram, len(a),
                 f"{a.min():.6f}", f"{a.max():.6f}", f"{std:.6f}", f"{a.mean():.6f}"]]
        extra = {"trial_accuracies": accs}
    _emit_csv(args, ["source", "D", "T", "n", "trials", "min_acc", "max_acc", "std_acc", "avg_acc"], rows, extra)


def cmd_bench(args):
    symbols = _alphabet(args)
    rng = np.random.default_rng(args.seed)
    texts = ["".join(rng.choice(symbols, size=args.text_length)) for _ in range(args.texts)]
    ngrams = args.texts * (args.text_length - args.ngram + 1)
    rows = []
    for source in args.sources:
        for D in args.dim:
            config = EncoderConfig(n=args.ngram, dim=D, T=args.t)
            spec = GeneratorSpec(source=source, seed=args.seed, sobol_pick="first")
            table = load_table(args.direction_file) if source == "sobol" else None
            t0 = time.perf_counter()
            memory = build_item_memory(symbols, spec, config, table)
            per_call = time.perf_counter() - t0
            amortized = ""
            if source == "sobol":
                # points already generated: only the thresholding is paid per memory
                from sobolhdc.hypervector import threshold_encode

                mat = sobol_matrix(table, len(symbols), D)
                t0 = time.perf_counter()
                for _ in range(args.repeats):
                    threshold_encode(mat, args.t)
                amortized = f"{(time.perf_counter() - t0) / args.repeats:.6f}"
            best = float("inf")
            for _ in range(args.repeats):
                t0 = time.perf_counter()
                encode_texts(texts, memory, config)
                best = min(best, time.perf_counter() - t0)
            memory_bytes = len(symbols) * ((D + 7) // 8) + HEADER.size
            rows.append([source, D, f"{args.texts / best:.1f}", f"{ngrams / best:.1f}",
                         f"{per_call:.6f}", amortized, memory_bytes])
    _emit_csv(args, ["source", "D", "texts_per_s", "ngrams_per_s", "generation_s",
                     "generation_amortized_s", "memory_bytes"], rows)


COMMANDS = {
    "sobol": cmd_sobol, "select": cmd_select, "sweep": cmd_sweep, "train": cmd_train,
    "infer": cmd_infer, "eval": cmd_eval, "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sobolhdc {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"sobolhdc {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
