"""Walk through the bath spectral-function layer.

Plots the piezo phonon density (nanowire + substrate), the thermal spectral
function C(w) at the measurement temperature, and a numerical check of
detailed balance C(-w) = exp(-w/T) C(w).

Usage:  python demos/bath_spectra.py  [outdir]
"""

import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dqdgain import OhmicBath, PiezoBath, piezo_constants

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out")
out.mkdir(parents=True, exist_ok=True)

# Microscopic estimate of the spectral weights vs the values fitted to the
# gain data: same order of magnitude, as it should be.
f_micro, p_micro = piezo_constants()
print(f"microscopic estimate:  F = {f_micro:.3f}, P = {p_micro:.3f}")
print("fitted to gain data:   F = 2.9,   P = 0.25")

bath = PiezoBath(weight_1d=2.9, weight_3d=0.25, temperature=7.8)
w = np.linspace(0.0, 8.0, 800)
j1 = np.array([bath.density_1d(x) for x in w])
j3 = np.array([bath.density_3d(x) for x in w])

fig, axes = plt.subplots(1, 3, figsize=(12, 3.4))
axes[0].plot(w, j1, label="nanowire (1D)")
axes[0].plot(w, j3, label="substrate (3D)")
axes[0].plot(w, j1 + j3, "k--", label="total")
axes[0].set_xlabel(r"$\omega/\omega_r$")
axes[0].set_ylabel(r"$J(\omega)/\omega_r$")
axes[0].legend(fontsize=8)
axes[0].set_title("piezo phonon density")

# Two-sided spectral function: emission side (w > 0) vs absorption (w < 0).
ws = np.linspace(-6.0, 6.0, 1200)
for T, style in ((7.8, "-"), (23.4, "--")):
    b = PiezoBath(weight_1d=2.9, weight_3d=0.25, temperature=T)
    c = np.array([b.value(x) for x in ws])
    axes[1].plot(ws, c, style, label=f"$k_BT/\\omega_r={T}$")
axes[1].set_xlabel(r"$\omega/\omega_r$")
axes[1].set_ylabel(r"$C(\omega)$")
axes[1].legend(fontsize=8)
axes[1].set_title("thermal spectral function")

# Detailed balance holds to machine precision for every variant.
wpos = np.linspace(0.1, 6.0, 200)
for b, label in ((bath, "piezo"), (OhmicBath(amplitude=1.0, temperature=7.8), "ohmic")):
    resid = [abs(b.value(-x) - np.exp(-x / b.temperature) * b.value(x))
             / b.value(x) for x in wpos]
    axes[2].semilogy(wpos, resid, label=label)
axes[2].set_xlabel(r"$\omega/\omega_r$")
axes[2].set_ylabel(r"$|C(-\omega) - e^{-\omega/T}C(\omega)| / C(\omega)$")
axes[2].legend(fontsize=8)
axes[2].set_title("detailed-balance residual")

fig.tight_layout()
fig.savefig(out / "bath_spectra.png", dpi=160)
print(f"wrote {out / 'bath_spectra.png'}")
