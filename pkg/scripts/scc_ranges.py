"""SCC and cosine extrema over the first 100 Sobol hypervectors for several D and T.

    python scripts/scc_ranges.py --table property-a --out ranges.csv
"""
import argparse
import csv
import sys

from sobolhdc.hypervector import threshold_encode
from sobolhdc.similarity import scc_range_monitor
from sobolhdc.sobol import load_table, sobol_matrix


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--table", default="property-a", help="bundled table name or direction file")
    p.add_argument("--sequences", type=int, default=100)
    p.add_argument("--dims", type=int, nargs="+", default=[2048, 4096, 8192])
    p.add_argument("--thresholds", type=float, nargs="+", default=[0.3, 0.5])
    p.add_argument("--out", default=None)
    args = p.parse_args(argv)

    table = load_table(args.table)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["D", "T", "min_scc", "max_scc", "min_cos", "max_cos", "min_cos_logic", "max_cos_logic"])
    for D in args.dims:
        points = sobol_matrix(table, args.sequences, D)
        for T in args.thresholds:
            r = scc_range_monitor(threshold_encode(points, T))
            w.writerow([D, T] + [f"{v:.4f}" for v in (r.min_scc, r.max_scc, r.min_cos, r.max_cos,
                                                        r.min_cos_logic, r.max_cos_logic)])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
