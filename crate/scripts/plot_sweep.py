#!/usr/bin/env python3
"""Line plot of max-min rate versus SNR from an `rsma-sim simulate` CSV."""

import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", help="sweep output")
    ap.add_argument("-o", "--out", default="sweep.png", help="image path")
    args = ap.parse_args()

    series = defaultdict(list)
    with open(args.csv, newline="") as f:
        for row in csv.DictReader(f):
            series[row["scheme"]].append(
                (float(row["snr_db"]), float(row["maxmin_rate_bps_hz"]), float(row["std_err"]))
            )

    fig, ax = plt.subplots(figsize=(6, 4))
    for scheme, pts in sorted(series.items()):
        pts.sort()
        xs, ys, es = zip(*pts)
        ax.errorbar(xs, ys, yerr=es, marker="o", ms=3, capsize=2, label=scheme)
    ax.set_xlabel("SNR of the weakest user (dB)")
    ax.set_ylabel("max-min rate (bit/s/Hz)")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
