"""Sobol vs LFSR vs random item memories on the synthetic corpus at small D.

For each D the Sobol threshold is picked by a sweep on a separate corpus draw;
the baselines use T=0.5. Reports min/max/std/avg accuracy over the trials and,
with --same-t, the random baseline re-run at the Sobol threshold.

    python scripts/small_d_comparison.py --dims 16 32 64 128 256 --trials 30
"""
import argparse
import csv
import sys

import numpy as np

from sobolhdc.classifier import EncoderConfig, GeneratorSpec, build_item_memory, evaluate, threshold_sweep, train
from sobolhdc.corpus import ALPHABET, split_per_class, synthetic_corpus
from sobolhdc.sobol import load_table


def accuracy(tr, te, spec, cfg, table=None):
    mem = build_item_memory(ALPHABET, spec, cfg, table)
    return evaluate(te, train(tr, mem, cfg), mem).accuracy


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--dims", type=int, nargs="+", default=[16, 32, 64, 128, 256])
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--ngram", type=int, default=4)
    p.add_argument("--table", default="property-a")
    p.add_argument("--validation-seed", type=int, default=10_000)
    p.add_argument("--same-t", action="store_true", help="also run random at the Sobol threshold")
    p.add_argument("--out", default=None)
    args = p.parse_args(argv)

    table = load_table(args.table)
    val = split_per_class(synthetic_corpus(texts_per_class=400, seed=args.validation_seed), 200)
    splits = [split_per_class(synthetic_corpus(seed=r), 50) for r in range(args.trials)]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["D", "method", "T", "min_acc", "max_acc", "std_acc", "avg_acc", "indexes"])
    for D in args.dims:
        T = threshold_sweep(*val, GeneratorSpec(sobol_pick="first"), D, n=args.ngram, table=table).best_T
        cfg = EncoderConfig(args.ngram, D, T)
        mem = build_item_memory(ALPHABET, GeneratorSpec("sobol"), cfg, table)
        sobol = [evaluate(te, train(tr, mem, cfg), mem).accuracy for tr, te in splits]
        w.writerow([D, "sobol", T, "", "", "", f"{np.mean(sobol):.4f}", " ".join(map(str, mem.indexes))])
        runs = [("random", 0.5), ("lfsr", 0.5)] + ([("random", T)] if args.same_t else [])
        for source, t in runs:
            accs = np.array([
                accuracy(tr, te, GeneratorSpec(source, seed=r), EncoderConfig(args.ngram, D, t))
                for r, (tr, te) in enumerate(splits)
            ])
            w.writerow([D, source, t, f"{accs.min():.4f}", f"{accs.max():.4f}",
                        f"{accs.std(ddof=1):.4f}", f"{accs.mean():.4f}", ""])
        fh.flush()
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
