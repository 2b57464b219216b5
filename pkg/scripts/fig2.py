"""Sphere-plate scalar curve family on the log2(L/a) grid from -2 to 5.

Writes fig2.csv (+ fig2.csv.json) through the CLI and prints a table.

    python3 scripts/fig2.py [--points 29] [--tol 1e-6] [--out fig2.csv]
"""
import argparse
import csv

from krein_casimir.cli import main


def parse_args():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--points", type=int, default=29)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", default="fig2.csv")
    return p.parse_args()


if __name__ == "__main__":
    args = parse_args()
    code = main(["fig2", "--scan", f"L:0.25:32:{args.points}:log", "--tol", str(args.tol), "--out", args.out])
    with open(args.out) as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    cols = list(rows[0])
    print("  ".join(f"{c[:12]:>12}" for c in cols))
    for row in rows:
        print("  ".join(f"{float(row[c]):12.5f}" for c in cols))
    raise SystemExit(code)
