#!/usr/bin/env python3
"""Print contact homology rank tables for the sphere cones and the C(k) family."""

import argparse

from reeb_index import toric


def row(label: str, cone, cutoff: int) -> str:
    table = toric.hc_table(cone, toric.nondegenerate_reeb_near(cone), cutoff)
    ranks = " ".join(f"{table.rank(d):>2}" for d in range(cutoff + 1))
    return f"{label:<8} k-={table.k_minus!s:<3} {ranks}"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cutoff", type=int, default=12)
    args = ap.parse_args()
    print(f"{'cone':<8} {'':<6} " + " ".join(f"{d:>2}" for d in range(args.cutoff + 1)))
    for n in (1, 2, 3):
        print(row(f"S^{2 * n + 1}", toric.sphere_cone(n), args.cutoff))
    for k in range(4):
        print(row(f"C({k})", toric.ck_cone(k), args.cutoff))


if __name__ == "__main__":
    main()
