"""
Three emitters on an equilateral triangle
=========================================

Close-packed emitters (kr = 0.01) with dipoles at the magic angle: the
collective decay rates are all close to 1 and the coherent couplings are
about -50. The triangle symmetry makes two pairs of dressed levels
degenerate and splits the levels into two blocks that never exchange
photons.
"""
from pathlib import Path

import numpy as np

from dressedfluor import compute_spectrum
from dressedfluor.config import load_preset
from dressedfluor.plotting import plot_spectrum

out = Path("out/demos")
out.mkdir(parents=True, exist_ok=True)

cfg = load_preset("equilateral_fig1")
result = compute_spectrum(cfg.layout, cfg.drive, cfg.spectrum, cfg.peaks)
system = result.system

print("Gamma_ij:\n", np.round(system.couplings.gamma, 6))
print("Omega_ij:\n", np.round(system.couplings.omega, 4))
print("dressed energies:", np.round(system.levels.energies, 3))
print("degenerate groups:", system.levels.degenerate_groups(1e-6))
print("coupling blocks:", system.blocks.as_sets())

# %%
# Fourteen sidebands plus the central line; every one sits on a transition
# E_a - E_b inside a block.
side = result.peaks.sidebands()
print(f"{len(side)} sidebands")
for m in result.assignment.matches:
    print(f"{m.center:9.3f} <- {list(m.pairs)[:4]}")

print("peaks between -230 and -180:", [round(p.center, 2) for p in result.peaks.in_window(-230, -180)])
plot_spectrum(result.spectrum, result.peaks, result.assignment, path=out / "equilateral.png", title="equilateral")
