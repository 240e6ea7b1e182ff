#!/usr/bin/env python3
"""Plot normalized forwarded packets from fwdgame simulation CSV output.

Usage:
    fwdgame manet --p0 0.3,0.7 --out out
    python3 docs/plot_manet.py out
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
    return {
        k: [float("nan") if r[k] == "nan" else float(r[k]) for r in rows]
        for k in rows[0]
    }


def main(out_dir):
    files = sorted(glob.glob(f"{out_dir}/manet_*.csv"))
    if not files:
        sys.exit(f"no manet CSVs under {out_dir}")

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in files:
        name = path.split("/")[-1].removeprefix("manet_").removesuffix(".csv")
        mode, p0 = name.rsplit("_p", 1)
        style = "-" if mode == "constrained" else "--"
        data = load(path)
        ax.plot(
            data["epoch"],
            data["normalized_forwarded"],
            style,
            label=f"{mode}, p0={p0}",
        )

    ax.set_xlabel("epoch")
    ax.set_ylabel("normalized forwarded packets")
    ax.set_title("Forwarding rate under constrained vs always-forward doves")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    fig.tight_layout()
    target = f"{out_dir}/manet.png"
    fig.savefig(target, dpi=150)
    print(f"wrote {target}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "out")
