"""Accuracy-vs-T curves on the synthetic corpus for several D, averaged over seeds.

    python scripts/threshold_curves.py --dims 1024 4096 --seeds 5 --out curves.csv --svg curves.svg
"""
import argparse
import csv
import sys

import numpy as np

from sobolhdc.classifier import GeneratorSpec, threshold_grid, threshold_sweep
from sobolhdc.corpus import split_per_class, synthetic_corpus
from sobolhdc.sobol import load_table


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--dims", type=int, nargs="+", default=[1024, 4096])
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--source", default="sobol", choices=("sobol", "lfsr", "random"))
    p.add_argument("--table", default="property-a")
    p.add_argument("--out", default=None)
    p.add_argument("--svg", default=None)
    args = p.parse_args(argv)

    table = load_table(args.table)
    grid = threshold_grid()
    curves, rows = {}, []
    for D in args.dims:
        acc = []
        for s in range(args.seeds):
            tr, va = split_per_class(synthetic_corpus(texts_per_class=400, seed=s), 200)
            res = threshold_sweep(tr, va, GeneratorSpec(args.source, seed=s, sobol_pick="first"), D, grid, table=table)
            acc.append(res.accuracies)
            print(f"D={D} seed={s} best T={res.best_T:.2f} acc={res.best_accuracy:.3f}", file=sys.stderr)
        curves[D] = np.mean(acc, axis=0)
        rows += [[D, f"{T:.2f}", f"{a:.4f}"] for T, a in zip(grid, curves[D])]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["D", "T", "mean_accuracy"])
    w.writerows(rows)
    if args.out:
        fh.close()
    if args.svg:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 3.5))
        for D, c in curves.items():
            ax.plot(grid, c, label=f"D={D}")
        ax.set_xlabel("T")
        ax.set_ylabel("mean accuracy")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.svg)


if __name__ == "__main__":
    main()
