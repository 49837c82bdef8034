"""
The Mollow triplet
==================

A single emitter driven far above saturation. The incoherent spectrum has a
central line of half-width 1/2 and two sidebands at +-Omega with half-width
3/4, carrying a quarter of the weight each.
"""
from pathlib import Path

import numpy as np
from scipy.integrate import trapezoid

from dressedfluor import DriveParameters, EmitterLayout, MAGIC_COS_THETA, compute_spectrum
from dressedfluor.pipeline import PeakSettings, SpectrumSettings
from dressedfluor.plotting import plot_spectrum

out = Path("out/demos")
out.mkdir(parents=True, exist_ok=True)

layout = EmitterLayout.pairwise([[0.0]], MAGIC_COS_THETA)
drive = DriveParameters(rabi=200.0)

# %%
# Compute the spectrum through the correlation-function route.
result = compute_spectrum(layout, drive, SpectrumSettings(), PeakSettings(prominence=1.0))
for p in result.peaks:
    print(f"peak at {p.center:9.3f}  half-width {p.half_width:.3f}  height {p.height:.3e}")

# %%
# Weights: central line 1/2, each sideband 1/4 of the incoherent intensity.
spec = result.spectrum
for lo, hi in [(-250, -150), (-50, 50), (150, 250)]:
    m = (spec.omega > lo) & (spec.omega < hi)
    print(f"weight in [{lo}, {hi}]: {trapezoid(spec.values[m], spec.omega[m]) / (2 * np.pi):.3f}")
print(f"coherent fraction: {spec.coherent_weight:.2e}")

plot_spectrum(spec, result.peaks, result.assignment, path=out / "mollow.png", title="Mollow triplet")
