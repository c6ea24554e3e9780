"""Temperature versus acceleration at a fixed probe gap.

Sweeps a0 over a decade at omega0 = pi/16 and prints T0 with its
log-grid derivative.  In this window the temperature rises nearly
linearly with acceleration at a slope close to one half.
"""

import numpy as np

from cavitherm import SweepGrid, temperature_slope

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

grid = SweepGrid(a0_values=np.geomspace(1.0, 10.0, 15),
                 omega0_values=np.array([np.pi / 16]),
                 lambda0=0.01, n_modes=20)
table = temperature_slope(grid)

a0 = grid.a0_values
t0 = table.t0[0]
slope = table.dt0_da0[0]

print(f"omega0 = {grid.omega0_values[0]:.6f}, lambda0 = {grid.lambda0}, "
      f"N = {grid.n_modes}")
print(f"{'a0':>10}  {'T0':>14}  {'dT0/da0':>10}")
for i in range(len(a0)):
    print(f"{a0[i]:10.5f}  {t0[i]:14.9f}  {slope[i]:10.5f}")

interior = slope[1:-1]
print(f"\ninterior slope range: [{interior.min():.4f}, {interior.max():.4f}]")
print("the slope drifts slowly with a0; it approaches 1/2 from above only")
print("deep in the small-gap regime.")

if plt is not None:
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
    ax1.loglog(a0, t0, "o-")
    ax1.set_ylabel("T0")
    ax2.semilogx(a0, slope, "o-")
    ax2.axhline(0.5, color="gray", ls="--", lw=1)
    ax2.set_xlabel("a0")
    ax2.set_ylabel("dT0/da0")
    fig.tight_layout()
    fig.savefig("acceleration_sweep.png", dpi=120)
    print("wrote acceleration_sweep.png")
