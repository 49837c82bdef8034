"""Resonance fluorescence of small clusters of interacting two-level emitters.

The package builds the collective master equation for emitters coupled
through the radiation field, computes the incoherent fluorescence spectrum
in the strong-driving regime, and relates each spectral line to a transition
between dressed levels.

Modules
-------
geometry
    Emitter layouts and pair couplings.
qops
    Spin operators on the ``2**N`` dimensional space.
dynamics
    Hamiltonians, Liouvillian, steady state and propagation.
spectrum
    First-order correlation, spectra and peak detection.
dressed
    Dressed levels, transition table, coupling blocks, peak assignment.
"""
from .dressed import (
    assign_peaks,
    collective_basis_lab,
    coupling_blocks,
    dressed_levels,
    level_diagram,
    manifold_report,
    transition_table,
)
from .dynamics import (
    DriveParameters,
    build_hamiltonian_lab,
    build_hamiltonian_rotating,
    build_liouvillian,
    propagate,
    steady_state,
)
from .errors import (
    DegenerateGeometryError,
    DressedFluorError,
    NoEmissionError,
    NonUniqueSteadyStateError,
    NumericalError,
    PlateauNotReachedError,
    ValidationError,
)
from .geometry import (
    MAGIC_COS_THETA,
    EmitterLayout,
    PairCouplings,
    build_couplings,
    coupling_gamma,
    coupling_omega,
    validate_strong_regime,
)
from .pipeline import PeakSettings, SpectrumSettings, compute_spectrum, prepare
from .spectrum import (
    Peak,
    PeakSet,
    Spectrum,
    detect_peaks,
    field_operator,
    g1_correlation,
    spectrum_eigen,
    spectrum_fourier,
    tau_grid,
)

__version__ = "0.1.0"
