from __future__ import annotations

import numpy as np
import pytest

from dressedfluor.config import load_preset
from dressedfluor.pipeline import compute_spectrum

PRESETS = ("mollow", "equilateral_fig1", "isosceles_fig2", "two_atom_magic")


@pytest.fixture(scope="session")
def preset_results():
    """Full Fourier-route results for every bundled preset, computed once."""
    out = {}
    for name in PRESETS:
        cfg = load_preset(name)
        out[name] = (cfg, compute_spectrum(cfg.layout, cfg.drive, cfg.spectrum, cfg.peaks))
    return out


def master_equation_rhs(h, gamma, lowering):
    """d rho/dt written with plain matrix products, no superoperators."""

    def rhs(rho):
        out = -1j * (h @ rho - rho @ h)
        n = len(lowering)
        for i in range(n):
            for j in range(n):
                sp_i = lowering[i].conj().T
                sm_j = lowering[j]
                out += 0.5 * gamma[i, j] * (
                    2 * sm_j @ rho @ sp_i - sp_i @ sm_j @ rho - rho @ sp_i @ sm_j
                )
        return out

    return rhs


def random_density_matrix(d, rng):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho)
