#!/usr/bin/env python3
"""Simulated maximum PAPR and analytic bound versus RRC roll-off (4-QAM),
for interleaved and block allocation."""

import argparse
from pathlib import Path

import numpy as np

from dftsotfs import GridConfig, make_constellation, rolloff_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--frames", type=int, default=600)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out-dir", default="results/rolloff")
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = GridConfig(128, 32, 4)
    qam = make_constellation(4)
    betas = np.round(np.arange(0.05, 1.0001, 0.05), 2)

    results = {}
    for scheme in ("interleaved", "block"):
        res = rolloff_sweep(grid, scheme, qam, betas, n_frames=args.frames, seed=args.seed)
        results[scheme] = res
        path = out / f"rolloff_{scheme}.csv"
        with open(path, "w") as fh:
            fh.write(f"# 4-QAM, M=128 N=32 Q=4, {args.frames} frames/beta, seed {args.seed}\n")
            fh.write("beta,max_papr_db,bound_db\n")
            for b, s, bd in zip(res.betas, res.max_papr_db, res.bound_db):
                fh.write(f"{float(b)!r},{float(s)!r},{float(bd)!r}\n")
        print(f"wrote {path}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 4))
        for scheme, res in results.items():
            ax.plot(res.betas, res.max_papr_db, "o-", label=f"{scheme} simulated max")
            ax.plot(res.betas, res.bound_db, "s--", label=f"{scheme} bound")
        ax.set_xlabel("roll-off factor")
        ax.set_ylabel("PAPR [dB]")
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(out / "rolloff.png", dpi=150)
        print(f"wrote {out / 'rolloff.png'}")


if __name__ == "__main__":
    main()
