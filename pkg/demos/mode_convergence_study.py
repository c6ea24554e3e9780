"""How many field modes per cavity are enough.

Repeats the acceleration sweep with increasing mode counts and reports
where each truncation departs from the largest one.  More acceleration
sweeps the probe across more cavity resonances, so the required N grows
with a0.
"""

import numpy as np

from cavitherm import mode_convergence

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

a0_values = np.geomspace(1.0, 20.0, 8)
study = mode_convergence(a0_values, omega0=np.pi / 16, lambda0=0.01,
                         n_list=(10, 20, 60, 110))

print("T0 by mode count:")
header = "  ".join(f"N={n:>4}" for n in study.n_list)
print(f"{'a0':>9}  {header}")
for i, a0 in enumerate(study.a0_values):
    cols = "  ".join(f"{study.t0[k, i]:.4f}" for k in range(len(study.n_list)))
    print(f"{a0:9.4f}  {cols}")

print(f"\nagreement limit vs N={study.n_list[-1]} "
      f"(largest a0 before T0 departs by more than {study.tolerance:.0%}):")
for k, n in enumerate(study.n_list):
    limit = study.agreement_limit[k]
    text = "entire range" if limit == study.a0_values[-1] else f"a0 <= {limit:.3f}"
    print(f"  N={n:>4}: {text}")

if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for k, n in enumerate(study.n_list):
        ax.semilogx(study.a0_values, study.dt0_da0[k], "o-", label=f"N={n}")
    ax.set_xlabel("a0")
    ax.set_ylabel("dT0/da0")
    ax.legend()
    fig.tight_layout()
    fig.savefig("mode_convergence.png", dpi=120)
    print("\nwrote mode_convergence.png")
