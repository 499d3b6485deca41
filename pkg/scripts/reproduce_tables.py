#!/usr/bin/env python3
"""Evaluate both built-in benchmark grids and write them as CSV.

Grid 1 (finite horizon) is a pure formula evaluation; grid 2 (infinite
horizon) estimates the Brownian-functional constant by Monte Carlo once per
distinct (c, sigma, delta) and then evaluates the formula.  Equivalent to

    ruintax table --which 1 --out table1.csv
    ruintax table --which 2 --phat-from-mc --out table2.csv
"""

import argparse

from ruintax import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-prefix", default="table")
    ap.add_argument("--n-paths", type=int, default=100_000)
    ap.add_argument("--eta", type=float, default=0.002)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rc = cli.main(["table", "--which", "1", "--out", f"{args.out_prefix}1.csv"])
    rc |= cli.main([
        "table", "--which", "2", "--phat-from-mc",
        "--n-paths", str(args.n_paths), "--eta", str(args.eta),
        "--seed", str(args.seed), "--out", f"{args.out_prefix}2.csv",
    ])
    return rc


if __name__ == "__main__":
    raise SystemExit(main())
