"""Per-stage resources after transpilation for cycle-graph MaxCut, m = 5, 10, 15.

    python3 scripts/resource_table.py [--out resources.json]
"""

import argparse
import json

from dqi.cli import resource_rows
from dqi.instances import cycle_maxcut, maxcut_to_xorsat

REFERENCE_COUNTS = {
    "uae": (14, 14, 14),
    "dicke": (110, 285, 452),
    "phase": (5, 10, 15),
    "constraint": (10, 20, 30),
    "gje": (12, 17, 46),
    "lookup": (1885, 17112, 67027),
    "hadamard": (10, 20, 30),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ell", type=int, default=2)
    ap.add_argument("--sizes", type=int, nargs="+", default=[5, 10, 15])
    ap.add_argument("--out", default=None, help="optional JSON output")
    args = ap.parse_args()

    table = {}
    for m in args.sizes:
        inst = maxcut_to_xorsat(cycle_maxcut(m))
        for row in resource_rows(inst, args.ell, transpile=True):
            meas = row["measured"]
            table.setdefault(row["stage"], {})[m] = {
                "gates": sum(meas["counts"].values()), "depth": meas["depth"], "qubits": meas["qubits"],
            }

    print(f"{'stage':<12}" + "".join(f"{'m=' + str(m):>30}" for m in args.sizes))
    for stage, by_m in table.items():
        cells = []
        for m in args.sizes:
            r = by_m[m]
            ref = REFERENCE_COUNTS[stage][(5, 10, 15).index(m)] if args.ell == 2 and m in (5, 10, 15) else None
            ref_s = f" ({ref})" if ref is not None else ""
            cells.append(f"{r['gates']}{ref_s} d={r['depth']} q={r['qubits']}")
        print(f"{stage:<12}" + "".join(f"{c:>30}" for c in cells))
    print("gate counts in parentheses are reference transpiled values")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"ell": args.ell, "stages": table}, fh, indent=2)


if __name__ == "__main__":
    main()
