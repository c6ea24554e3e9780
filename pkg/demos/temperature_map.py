"""Coarse map of the slope dT0/da0 over the (a0, omega0) plane.

A 14 x 14 log-log grid takes a minute or two on one core; the full-size
map is the same call with the default 40 x 40 grid.  Writes the CSV next
to this script and, when matplotlib is present, a heat map with the
phase-boundary, mode-crossing, and resonance-sweep curves overlaid.
"""

import numpy as np

from cavitherm import SweepGrid, result_rows, run_sweep, temperature_slope, write_csv

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

grid = SweepGrid(a0_values=np.geomspace(5e-2, 1e2, 14),
                 omega0_values=np.geomspace(np.pi / 32, 4 * np.pi, 14),
                 lambda0=0.01, n_modes=20)

print(f"running {len(grid.a0_values) * len(grid.omega0_values)} grid points...")
results = run_sweep(grid)
table = temperature_slope(grid, results=results)

failed = sum(1 for r in results if r.error_code)
print(f"done; {failed} failed points")

write_csv("temperature_map.csv",
          result_rows(results, grid=grid, slope_table=table))
print("wrote temperature_map.csv")

# where the slope sits within 10% of one half
near_half = np.abs(table.dt0_da0 - 0.5) <= 0.05
print(f"{near_half.sum()} of {near_half.size} points have slope within "
      f"10% of 1/2")

if plt is not None:
    a0, om = grid.a0_values, grid.omega0_values
    fig, ax = plt.subplots(figsize=(6.5, 5))
    mesh = ax.pcolormesh(a0, om, table.dt0_da0, shading="nearest",
                         cmap="viridis", vmin=0.0, vmax=0.6)
    fig.colorbar(mesh, ax=ax, label="dT0/da0")
    diag = table.diagnostics
    for n, curve in diag["phase_boundaries"].items():
        ax.plot(a0, curve, "w--", lw=1)
    for m, a_star in diag["crossing_ratios"].items():
        ax.axvline(a_star, color="w", ls=":", lw=1)
    for r, curve in diag["mode_sweeps"].items():
        ax.plot(a0, curve, "r-", lw=0.8)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlim(a0[0], a0[-1])
    ax.set_ylim(om[0], om[-1])
    ax.set_xlabel("a0")
    ax.set_ylabel("omega0")
    fig.tight_layout()
    fig.savefig("temperature_map.png", dpi=120)
    print("wrote temperature_map.png")
