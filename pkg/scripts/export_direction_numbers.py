"""Write the bundled direction-number file from SciPy's copy of the Joe-Kuo table.

SciPy ships ``new-joe-kuo-6.21201`` as an ``.npz`` (``poly`` holds the full
primitive polynomial including the leading and trailing terms, ``vinit`` the
initial m values). This script re-emits the first dimensions in the plain
``d s a m_1 ... m_s`` text layout read by :func:`sobolhdc.sobol.parse_direction_file`.

    python scripts/export_direction_numbers.py --max-dim 1111
"""
import argparse
import os
from pathlib import Path

import numpy as np
from scipy.stats import _sobol

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src" / "sobolhdc" / "data" / "new-joe-kuo-1111.txt"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-dim", type=int, default=1111)
    parser.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = parser.parse_args()

    data = np.load(os.path.join(os.path.dirname(_sobol.__file__), "_sobol_direction_numbers.npz"))
    poly, vinit = data["poly"], data["vinit"]

    lines = ["d       s       a       m_i"]
    # row 0 of the npz is the van der Corput dimension, which has no file entry
    for row in range(1, args.max_dim):
        p = int(poly[row])
        s = p.bit_length() - 1
        a = (p >> 1) & ((1 << (s - 1)) - 1)
        m = [int(v) for v in vinit[row, :s]]
        lines.append(" ".join(str(x) for x in [row + 1, s, a, *m]))
    args.out.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} entries to {args.out}")


if __name__ == "__main__":
    main()
