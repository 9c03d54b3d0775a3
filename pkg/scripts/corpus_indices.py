#!/usr/bin/env python3
"""Index report and ellipticity verdict for each path of a seeded corpus."""

import argparse

from reeb_index.bott import elliptic_certificate
from reeb_index.corpus import corpus
from reeb_index.index import index_report


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--j", type=int, default=2, help="iterate used by the certificate")
    args = ap.parse_args()
    print(f"{'label':<22} {'n':>2} {'mu_rs':>6} {'mu-':>4} {'mu+':>4} {'mean':>8}  verdict")
    for entry in corpus(args.count, seed=args.seed):
        rep = index_report(entry.path)
        verdict = elliptic_certificate(entry.path, args.j).status
        print(f"{entry.label:<22} {entry.path.n:>2} {str(rep.mu_rs):>6} {rep.mu_minus:>4} {rep.mu_plus:>4} "
              f"{rep.mean:>8.3f}  {verdict}")


if __name__ == "__main__":
    main()
