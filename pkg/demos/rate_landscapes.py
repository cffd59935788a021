"""Effective resonator rate surfaces kappa_{+-,4}(w_q, theta).

Above the resonance (w_q > w_r) the fourth-order resonator rates are
positive for any qubit population; below it they can turn negative, the
signature of the truncated perturbative series losing complete positivity.

Usage:  python demos/rate_landscapes.py  [outdir]
"""

import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dqdgain import OhmicBath, SystemParams, run_rate_landscape

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out")
out.mkdir(parents=True, exist_ok=True)

p = SystemParams(epsilon_q=1.0, delta_q=1.0, g=0.01)
x = np.linspace(0.3, 3.0, 120)
y = np.linspace(0.1 * np.pi, 0.9 * np.pi, 100)

fig, axes = plt.subplots(2, 2, figsize=(9, 7), sharex=True, sharey=True)
for row, temperature in enumerate((0.0, 0.2)):
    bath = OhmicBath(amplitude=1.0, temperature=temperature)
    for col, p_excited in enumerate((0.0, 1.0)):
        r = run_rate_landscape(p, bath, "omega_q", x, "theta", y,
                               which="kappa", p_excited=p_excited)
        panel = r.panels["kappa_plus4"] if p_excited else r.panels["kappa_minus4"]
        name = r"$\kappa_{+,4}$" if p_excited else r"$\kappa_{-,4}$"
        ax = axes[row, col]
        lim = np.nanpercentile(np.abs(panel), 98)
        im = ax.pcolormesh(x, y / np.pi, panel, cmap="RdBu_r",
                           vmin=-lim, vmax=lim, shading="auto")
        ax.axvline(1.0, color="k", ls=":", lw=0.8)  # resonance w_q = w_r
        ax.set_title(f"{name}$/g^2$ at $P_e = {p_excited:g}$, "
                     f"$T = {temperature:g}\\,\\omega_r$", fontsize=9)
        fig.colorbar(im, ax=ax)
for ax in axes[1]:
    ax.set_xlabel(r"$\omega_q/\omega_r$")
for ax in axes[:, 0]:
    ax.set_ylabel(r"$\theta/\pi$")

fig.tight_layout()
fig.savefig(out / "rate_landscapes.png", dpi=160)
print(f"wrote {out / 'rate_landscapes.png'}")
