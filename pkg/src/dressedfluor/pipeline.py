"""End-to-end helpers that chain the building blocks for one configuration."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dressed import (
    CouplingBlocks,
    DressedLevels,
    PeakAssignment,
    TransitionTable,
    assign_peaks,
    coupling_blocks,
    dressed_levels,
    transition_table,
)
from .dynamics import (
    DriveParameters,
    Liouvillian,
    SteadyState,
    build_hamiltonian_rotating,
    build_liouvillian,
    steady_state,
)
from .errors import ValidationError
from .geometry import EmitterLayout, PairCouplings, StrongRegimeReport, build_couplings, validate_strong_regime
from .spectrum import (
    DEFAULT_TAU_LENGTH,
    DEFAULT_TAU_SPACING,
    CorrelationTrace,
    FieldOperator,
    PeakSet,
    Spectrum,
    detect_peaks,
    field_operator,
    g1_correlation,
    spectrum_eigen,
    spectrum_fourier,
    tau_grid,
)

__all__ = ["SpectrumSettings", "PeakSettings", "System", "SpectrumResult", "prepare", "compute_spectrum"]


@dataclass(frozen=True)
class SpectrumSettings:
    tau_spacing: float = DEFAULT_TAU_SPACING
    tau_length: float = DEFAULT_TAU_LENGTH
    omega_max: float = 700.0
    omega_spacing: float = 0.05
    method: str = "fourier"  # or "eigen"
    observation_direction: Optional[tuple] = None

    def __post_init__(self):
        if self.method not in ("fourier", "eigen"):
            raise ValidationError(f"unknown spectrum method {self.method!r}")
        if not (self.tau_spacing > 0 and self.tau_length > self.tau_spacing):
            raise ValidationError("need 0 < tau_spacing < tau_length")
        if not (0 < self.omega_max < np.pi / self.tau_spacing):
            raise ValidationError(
                f"omega_max must lie in (0, {np.pi / self.tau_spacing:.6g}) for tau_spacing {self.tau_spacing}"
            )
        if not self.omega_spacing > 0:
            raise ValidationError("omega_spacing must be > 0")


@dataclass(frozen=True)
class PeakSettings:
    prominence: float = 1.0
    separation: float = 2.0
    tolerance: float = 1.0

    def __post_init__(self):
        if not (self.prominence > 0 and self.separation > 0 and self.tolerance > 0):
            raise ValidationError("peak prominence, separation and tolerance must be > 0")


@dataclass
class System:
    """Layout, drive and every derived object that does not need a spectrum."""

    layout: EmitterLayout
    drive: DriveParameters
    couplings: PairCouplings
    liouvillian: Liouvillian
    steady: SteadyState
    field: FieldOperator
    levels: DressedLevels
    table: TransitionTable
    blocks: CouplingBlocks
    regime: Optional[StrongRegimeReport]


def prepare(layout: EmitterLayout, drive: DriveParameters, observation_direction=None) -> System:
    couplings = build_couplings(layout)
    liou = build_liouvillian(layout, couplings, drive)
    ss = steady_state(liou)
    f = field_operator(layout, observation_direction)
    levels = dressed_levels(build_hamiltonian_rotating(layout, couplings, drive))
    table = transition_table(levels, f)
    blocks = coupling_blocks(table)
    regime = validate_strong_regime(couplings, drive.rabi) if drive.rabi > 0 else None
    return System(layout, drive, couplings, liou, ss, f, levels, table, blocks, regime)


@dataclass
class SpectrumResult:
    system: System
    spectrum: Spectrum
    peaks: PeakSet
    assignment: PeakAssignment
    trace: Optional[CorrelationTrace] = None


def compute_spectrum(
    layout: EmitterLayout,
    drive: DriveParameters,
    settings: SpectrumSettings = SpectrumSettings(),
    peak_settings: PeakSettings = PeakSettings(),
    system: Optional[System] = None,
) -> SpectrumResult:
    sys_ = system or prepare(layout, drive, settings.observation_direction)
    trace = None
    if settings.method == "fourier":
        trace = g1_correlation(
            sys_.liouvillian, sys_.steady, sys_.field, tau_grid(settings.tau_spacing, settings.tau_length)
        )
        spec = spectrum_fourier(trace, settings.omega_max, settings.omega_spacing)
    else:
        n = int(np.floor(settings.omega_max / settings.omega_spacing))
        omega = np.arange(-n, n + 1) * settings.omega_spacing
        spec = spectrum_eigen(sys_.liouvillian, sys_.steady, sys_.field, omega)
    peaks = detect_peaks(spec, peak_settings.prominence, peak_settings.separation)
    assignment = assign_peaks(peaks, sys_.table, max(peak_settings.tolerance, spec.spacing))
    return SpectrumResult(sys_, spec, peaks, assignment, trace)
