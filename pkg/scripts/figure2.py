"""Three-mode entropy on the two constrained slices; writes figure2.csv (plus PNG if possible)."""

import argparse

import numpy as np

from cofermion import experiments as ex

ap = argparse.ArgumentParser()
ap.add_argument("--grid", type=int, default=32)
ap.add_argument("--out", default="figure2.csv")
args = ap.parse_args()

rows = ex.figure2_rows(args.grid)
ex.write_csv(ex.FIGURE2_HEADER, rows, args.out)
upper = np.array([r[1:] for r in rows if r[0] == "upper"], dtype=float)
lower = np.array([r[1:] for r in rows if r[0] == "lower"], dtype=float)
print(f"upper slice: {len(upper)} points, S1 in [{upper[:, 6].min():.4f}, {upper[:, 6].max():.4f}]")
print(f"lower slice: {len(lower)} points on S1 = ln 3 "
      f"(max deviation {np.abs(lower[:, 6] - np.log(3)).max():.1e}), "
      f"S2 in [{lower[:, 7].min():.4f}, {lower[:, 7].max():.4f}]")

try:
    import matplotlib
except ImportError:
    print("matplotlib not installed; skipping the plot")
else:
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(1, 2, figsize=(9, 3.5))
    c0 = ax[0].tricontour(upper[:, 0], upper[:, 1], upper[:, 6], levels=12)
    ax[0].set(xlabel="theta1", ylabel="theta3", title="S1, shift angles at pi/3")
    fig.colorbar(c0, ax=ax[0])
    c1 = ax[1].tricontour(lower[:, 0], lower[:, 1], lower[:, 7], levels=12)
    ax[1].set(xlabel="theta3", ylabel="phi2", title="S2 where S1 = ln 3")
    fig.colorbar(c1, ax=ax[1])
    fig.tight_layout()
    fig.savefig(args.out.replace(".csv", ".png"), dpi=150)
