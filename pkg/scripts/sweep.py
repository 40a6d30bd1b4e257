"""Total gate count and depth per stage versus instance size (cycle-graph MaxCut).

    python3 scripts/sweep.py --m-max 30 [--transpile] [--out sweep.csv]
"""

import argparse
import csv
import sys

from dqi.cli import SWEEP_COLUMNS, sweep_rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m-min", type=int, default=4)
    ap.add_argument("--m-max", type=int, default=20)
    ap.add_argument("--ell", type=int, default=2)
    ap.add_argument("--transpile", action="store_true")
    ap.add_argument("--lookup-cap", type=int, default=4096)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    rows = sweep_rows(range(max(args.m_min, 3), args.m_max + 1), args.ell, args.transpile, args.lookup_cap)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()


if __name__ == "__main__":
    main()
