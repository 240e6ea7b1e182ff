#!/usr/bin/env python3
"""Plot replicator trajectories and dove utilities from fwdgame CSV output.

Usage:
    fwdgame replicator --p0 0.3,0.7 --out out
    python3 docs/plot_replicator.py out
"""

import csv
import glob
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return {k: [float(r[k]) for r in rows] for k in rows[0]}


def main(out_dir):
    files = sorted(glob.glob(f"{out_dir}/replicator_*.csv"))
    if not files:
        sys.exit(f"no replicator CSVs under {out_dir}")

    fig, (ax_share, ax_utility) = plt.subplots(1, 2, figsize=(11, 4.5))
    for path in files:
        name = path.split("/")[-1].removeprefix("replicator_").removesuffix(".csv")
        mode, p0 = name.rsplit("_p", 1)
        style = "-" if mode == "constrained" else "--"
        data = load(path)
        ax_share.plot(data["t"], data["p"], style, label=f"{mode}, p0={p0}")
        ax_utility.plot(data["t"], data["u_dove"], style, label=f"{mode}, p0={p0}")

    ax_share.set_xlabel("time")
    ax_share.set_ylabel("dove share p")
    ax_share.set_title("Population dynamics")
    ax_share.legend()
    ax_utility.set_xlabel("time")
    ax_utility.set_ylabel("dove expected utility")
    ax_utility.set_title("Dove utility along the trajectory")
    ax_utility.legend()
    fig.tight_layout()
    target = f"{out_dir}/replicator.png"
    fig.savefig(target, dpi=150)
    print(f"wrote {target}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "out")
