#!/usr/bin/env python3
"""Render CSV output of the strip CLI.

    python3 scripts/plot.py ell_curve.csv [more.csv ...] -o figure.png

The kind of plot follows the CSV header: ell-curve, profile (x,v),
snapshots (t,x,u) or threshold log.
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def load(path):
    meta = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
    return pd.read_csv(path, comment="#"), meta


def plot_file(ax, path):
    df, meta = load(path)
    cols = list(df.columns)
    if cols[:2] == ["a", "v1"]:
        ax.plot(df["a"], df["ell"], label=path)
        ax.set_xscale("log")
        ax.set_xlabel("a")
        ax.set_ylabel("ell(a)")
    elif cols == ["x", "v"]:
        label = meta.get("kind", path)
        if "L" in meta:
            label += f" L={float(meta['L']):.4g}"
        ax.plot(df["x"], df["v"], label=label)
        ax.set_xlabel("x")
        ax.set_ylabel("v")
    elif cols == ["t", "x", "u"]:
        for t, frame in df.groupby("t"):
            ax.plot(frame["x"], frame["u"], lw=0.8, label=f"t={t:g}")
        ax.set_xlabel("x")
        ax.set_ylabel("u")
    elif cols[:2] == ["sigma", "outcome"]:
        for outcome, frame in df.groupby("outcome"):
            ax.scatter(frame["sigma"], frame["final_t"], s=12, label=outcome)
        ax.set_xlabel("sigma")
        ax.set_ylabel("final t")
    else:
        sys.exit(f"{path}: unrecognised columns {cols}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv", nargs="+")
    ap.add_argument("-o", "--output", default="figure.png")
    args = ap.parse_args()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in args.csv:
        plot_file(ax, path)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
