#!/usr/bin/env python3
"""Write ordinates of the first nontrivial zeta zeros, one per line.

Usage: gen_zeros.py COUNT OUTPUT
Ordinates are computed with mpmath.zetazero at 30 digits and written with
12 decimals.
"""
import sys

import mpmath


def main():
    count = int(sys.argv[1])
    out = sys.argv[2]
    mpmath.mp.dps = 30
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# ordinates gamma of rho = 1/2 + i*gamma, ascending\n")
        fh.write(f"# first {count} zeros, mpmath {mpmath.__version__} zetazero, 12 decimals\n")
        for k in range(1, count + 1):
            g = mpmath.zetazero(k).imag
            fh.write(mpmath.nstr(g, len(str(int(g))) + 12, strip_zeros=False) + "\n")
            if k % 250 == 0:
                fh.flush()
                print(k, file=sys.stderr, flush=True)


if __name__ == "__main__":
    main()
