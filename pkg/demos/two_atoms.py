"""
Two interacting emitters
========================

With one partner at kr = 0.01 the single-atom Mollow sidebands at +-200
disappear and new lines appear, split by the dipole-dipole shift. A scan
over the separation shows them merging back towards the Mollow positions
as the interaction weakens.
"""
import numpy as np

from dressedfluor import DriveParameters, EmitterLayout, MAGIC_COS_THETA, compute_spectrum
from dressedfluor.pipeline import PeakSettings, SpectrumSettings

drive = DriveParameters(rabi=200.0)
peaks = PeakSettings(prominence=0.1)
settings = SpectrumSettings(tau_length=60.0)

for kr in (0.01, 0.03, 0.1, 0.3):
    layout = EmitterLayout.pairwise([[0, kr], [kr, 0]], MAGIC_COS_THETA)
    res = compute_spectrum(layout, drive, settings, peaks)
    omega12 = res.system.couplings.omega[0, 1]
    side = [p.center for p in res.peaks.sidebands() if p.center > 0]
    print(f"kr = {kr:5.2f}  Omega_12 = {omega12:8.3f}  positive sidebands {np.round(side, 2).tolist()}")
