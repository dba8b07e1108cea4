#!/usr/bin/env python3
"""Plot cost curves written by `lbdd cost curve`.

    lbdd cost curve --variant cap-small-eps-classical --out small.csv
    lbdd cost curve --variant minfind-quantum --out mq.csv
    python3 docs/plot_curves.py small.csv mq.csv -o curves.png

Each CSV has a "b,c" header. Rows with c = nan are skipped.
"""
import argparse
import csv
import math
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_curve(path):
    bs, cs = [], []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            c = float(row["c"])
            if math.isnan(c):
                continue
            bs.append(float(row["b"]))
            cs.append(c)
    return bs, cs


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("csv", nargs="+")
    ap.add_argument("-o", "--out", default="curves.png")
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(6, 4))
    for path in args.csv:
        bs, cs = read_curve(path)
        ax.plot(bs, cs, label=pathlib.Path(path).stem)
    ax.set_xlabel("b  (log2 of the kissing constant, per dimension)")
    ax.set_ylabel("c  (time exponent, 2^{cn})")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
