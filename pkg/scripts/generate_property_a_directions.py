"""Build a 1111-dimension direction-number table with random initial m values
that satisfies Sobol's Property A for every leading dimension count.

This is the construction behind the 2003 Joe-Kuo table that MATLAB's
``sobolset`` uses: the primitive polynomials are the usual ones (taken from the
bundled 2008 file) and the initial m_k are drawn at random, redrawn until the
new dimension keeps the leading d x d top-bit matrix nonsingular over GF(2).

    python scripts/generate_property_a_directions.py --seed 2003
"""
import argparse
from pathlib import Path

import numpy as np

from sobolhdc.sobol import DirectionEntry, MAX_DIMENSIONS, parse_direction_file

DATA = Path(__file__).resolve().parents[1] / "src" / "sobolhdc" / "data"


def top_bits(entry: DirectionEntry, initial_top: list[int], n: int) -> int:
    """First binary digit of v_1 .. v_n packed into an int (bit k-1 <-> v_k).

    The leading digit of m_k / 2^k obeys the same recurrence without the
    trailing ``m_{k-s}`` term, which never reaches that digit.
    """
    s = entry.degree
    t = list(initial_top)
    for k in range(s, n):
        bit = t[k - s]
        for i, a in enumerate(entry.poly_coeffs, start=1):
            if a:
                bit ^= t[k - i]
        t.append(bit)
    return sum(b << k for k, b in enumerate(t))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=2003)
    parser.add_argument("--max-dim", type=int, default=MAX_DIMENSIONS)
    parser.add_argument("--out", type=Path, default=DATA / "property-a-1111.txt")
    parser.add_argument("--tries", type=int, default=64)
    parser.add_argument("--max-backtracks", type=int, default=100000)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    source = parse_direction_file(DATA / "new-joe-kuo-1111.txt", args.max_dim)
    n = args.max_dim

    # pivots[c] = reduced row whose lowest set bit is column c (columns 0..n-1)
    pivots: dict[int, int] = {0: 1}  # dimension 1: v_k = 2^-k, only v_1 has a leading 1
    chosen: list[list[int]] = []
    entries = source.entries
    col, backtracks = 1, 0
    while col <= len(entries):
        base = entries[col - 1]
        s = base.degree
        for _ in range(args.tries):
            m = [int(rng.integers(0, 2 ** (k - 1))) * 2 + 1 for k in range(1, s + 1)]
            row = top_bits(base, [(mk >> (k - 1)) & 1 for k, mk in enumerate(m, start=1)], n)
            for c in range(col):
                if (row >> c) & 1:
                    row ^= pivots[c]
            if (row >> col) & 1:
                pivots[col] = row
                chosen.append(m)
                col += 1
                break
        else:
            # the pivot digit does not depend on this dimension's free bits: redraw the previous one
            backtracks += 1
            if col == 1 or backtracks > args.max_backtracks:
                raise SystemExit(f"no admissible initial values for dimension {base.dimension_index}")
            col -= 1
            del pivots[col]
            chosen.pop()

    lines = ["d       s       a       m_i"]
    for base, m in zip(entries, chosen):
        a = 0
        for coeff in base.poly_coeffs:
            a = (a << 1) | coeff
        lines.append(" ".join(str(x) for x in [base.dimension_index, base.degree, a, *m]))
    print(f"{backtracks} backtracks")
    args.out.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} entries to {args.out}")


if __name__ == "__main__":
    main()
