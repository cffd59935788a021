"""Reproduce the gain/loss profile of the driven DQD-resonator system.

Sweeps the DQD bias at the locked measurement parameters and compares the
three theory variants: the four polaron-type correlated dissipators, the six
dominant rates (adding the dephasing-assisted photon channels), and the full
21-dissipator set.  The dephasing-assisted terms are what deepens the loss
trough on the negative-bias side.

Usage:  python demos/gain_profile.py  [outdir]   (takes ~1 minute)
"""

import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dqdgain import run_fig2

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out")
out.mkdir(parents=True, exist_ok=True)

res = run_fig2(count=241)

fig, axes = plt.subplots(3, 1, figsize=(6.2, 8.5), sharex=True)
styles = {"polaron": ("C0", "--"), "dominant6": ("k", "-"), "full21": ("C3", ":")}
for name, sweep in res.sweeps.items():
    color, ls = styles[name]
    axes[0].semilogy(sweep.epsilon, sweep.gain_smoothed, ls, color=color,
                     label=name)
axes[0].axhline(1.0, color="0.7", lw=0.8)
axes[0].set_ylabel("power gain $G$")
axes[0].legend(fontsize=8)
axes[0].set_title(r"$k_BT/\omega_r = 7.8$, $\Delta_q/\omega_r = 3$, "
                  r"$g/\omega_r = 0.0125$, $\kappa/\omega_r = 52\times10^{-6}$")

axes[1].semilogy(res.epsilon, res.rates["down_plus"], "--", label=r"$\gamma_{\downarrow+}$")
axes[1].semilogy(res.epsilon, res.rates["down_minus"], ":", label=r"$\gamma_{\downarrow-}$")
axes[1].semilogy(res.epsilon, res.rates["phi_minus"], "-", label=r"$\gamma_{\varphi-}$")
axes[1].set_ylabel(r"correlated rates $/\omega_r$")
axes[1].legend(fontsize=8)

axes[2].plot(res.epsilon, res.sigma_z_steady, "k-", label=r"$\langle\sigma_z\rangle_{ss}$")
axes[2].plot(res.epsilon, res.sigma_z_thermal, "C0--", label=r"$\langle\sigma_z\rangle_{th}$")
axes[2].set_xlabel(r"$\epsilon_q/\omega_r$")
axes[2].set_ylabel(r"$\langle\sigma_z\rangle$")
axes[2].legend(fontsize=8)

fig.tight_layout()
fig.savefig(out / "gain_profile.png", dpi=160)

full = res.sweeps["full21"]
imax, imin = np.nanargmax(full.gain_smoothed), np.nanargmin(full.gain_smoothed)
print(f"full theory: peak G = {full.gain_smoothed[imax]:.3f} at "
      f"eps_q = {full.epsilon[imax]:+.2f}, trough G = "
      f"{full.gain_smoothed[imin]:.3f} at eps_q = {full.epsilon[imin]:+.2f}")
print(f"wrote {out / 'gain_profile.png'}")
