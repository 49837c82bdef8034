"""Hamiltonians, Liouvillian, steady state and time evolution.

The Liouvillian acts on column-stacked density matrices (see
:func:`dressedfluor.qops.vec`) with the convention ``d vec(rho)/dt = L @
vec(rho)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .errors import NonUniqueSteadyStateError, NumericalError, ValidationError
from .geometry import EmitterLayout, LayoutMode, PairCouplings, _unit_vector
from .qops import site_lowering, unvec, vec

__all__ = [
    "DriveParameters",
    "Liouvillian",
    "SteadyState",
    "build_hamiltonian_rotating",
    "build_hamiltonian_lab",
    "build_liouvillian",
    "steady_state",
    "propagate",
    "propagator",
]

RESIDUAL_TOL = 1e-9
NULL_SPACE_RTOL = 1e-10


@dataclass(frozen=True)
class DriveParameters:
    """Laser drive: Rabi frequency, detuning ``omega_a - omega_L`` and k-hat."""

    rabi: float
    detuning: float = 0.0
    wave_vector_direction: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if not (np.isfinite(self.rabi) and self.rabi >= 0):
            raise ValidationError(f"rabi must be finite and >= 0, got {self.rabi!r}")
        if not np.isfinite(self.detuning):
            raise ValidationError("detuning must be finite")
        _unit_vector(self.wave_vector_direction, "wave_vector_direction")


def _check_sizes(layout, couplings):
    if layout is not None and layout.n_atoms != couplings.n_atoms:
        raise ValidationError(
            f"layout has {layout.n_atoms} emitters but couplings are {couplings.n_atoms}x{couplings.n_atoms}"
        )


def _interaction(couplings: PairCouplings, lowering) -> np.ndarray:
    n = couplings.n_atoms
    d = 2**n
    h = np.zeros((d, d), dtype=complex)
    for i in range(n):
        for j in range(n):
            if i != j and couplings.omega[i, j] != 0:
                h += couplings.omega[i, j] * lowering[i].conj().T @ lowering[j]
    return h


def build_hamiltonian_rotating(
    layout: EmitterLayout, couplings: PairCouplings, drive: DriveParameters
) -> np.ndarray:
    """Driven, interacting Hamiltonian in the frame rotating at the laser frequency.

    Pairwise layouts place every emitter at the origin, so all drive phases
    are 1.
    """
    _check_sizes(layout, couplings)
    n = couplings.n_atoms
    lowering = [site_lowering(i, n) for i in range(n)]
    if layout.mode is LayoutMode.GEOMETRIC:
        phases = np.exp(-1j * layout.positions @ np.asarray(drive.wave_vector_direction, dtype=float))
    else:
        phases = np.ones(n)
    h = _interaction(couplings, lowering)
    for i, sm in enumerate(lowering):
        drive_term = phases[i] * sm
        h += 0.5 * drive.rabi * (drive_term + drive_term.conj().T)
        h += drive.detuning * sm.conj().T @ sm
    return h


def build_hamiltonian_lab(couplings: PairCouplings, omega_a: float) -> np.ndarray:
    """Undriven lab-frame Hamiltonian ``omega_a * N_exc + sum Omega_ij s+_i s-_j``.

    The free part uses the excitation-number operator, so the all-ground ket
    has energy zero. The eigenvectors do not depend on this choice.
    """
    if not omega_a > 0:
        raise ValidationError("omega_a must be > 0")
    n = couplings.n_atoms
    lowering = [site_lowering(i, n) for i in range(n)]
    h = _interaction(couplings, lowering)
    for sm in lowering:
        h += omega_a * sm.conj().T @ sm
    return h


@dataclass(eq=False)
class Liouvillian:
    """Dense superoperator on column-stacked ``d x d`` matrices."""

    matrix: np.ndarray
    hilbert_dim: int
    hamiltonian: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        d2 = self.hilbert_dim**2
        if self.matrix.shape != (d2, d2):
            raise ValidationError(f"Liouvillian must be {d2}x{d2}, got {self.matrix.shape}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, x: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(x), self.hilbert_dim)

    @cached_property
    def norm(self) -> float:
        """Induced 1-norm, used as the scale for relative tolerances."""
        return float(np.linalg.norm(self.matrix, 1))

    @cached_property
    def eigen(self):
        """``(eigenvalues, right eigenvectors)`` ordered by decreasing real part."""
        lam, r = sla.eig(self.matrix)
        order = np.lexsort((np.abs(lam), -lam.real))
        return lam[order], r[:, order]


def build_liouvillian(
    layout: EmitterLayout, couplings: PairCouplings, drive: DriveParameters
) -> Liouvillian:
    """Master-equation generator with coherent drive and collective decay.

    ``L[rho] = i[rho, H] + 1/2 sum_ij G_ij (2 s-_j rho s+_i - s+_i s-_j rho - rho s+_i s-_j)``
    with ``G_ii = 1``.
    """
    h = build_hamiltonian_rotating(layout, couplings, drive)
    n = couplings.n_atoms
    d = 2**n
    eye = np.eye(d)
    lowering = [site_lowering(i, n) for i in range(n)]
    g = couplings.gamma
    anti = np.zeros((d, d), dtype=complex)
    jump = np.zeros((d * d, d * d), dtype=complex)
    for i in range(n):
        k_i = sum(g[i, j] * lowering[j] for j in range(n))
        anti += lowering[i].conj().T @ k_i
        # vec(A X B) = (B^T kron A) vec(X), and (s+_i)^T = s-_i
        jump += np.kron(lowering[i], k_i)
    # -i (H - i A/2) rho + i rho (H + i A/2) + jumps
    heff = h - 0.5j * anti
    mat = -1j * np.kron(eye, heff) + 1j * np.kron(heff.conj(), eye) + jump
    return Liouvillian(mat, d, h)


@dataclass(frozen=True)
class SteadyState:
    rho: np.ndarray
    residual: float
    spectral_gap: float
    null_ratio: float  # |second smallest eigenvalue| / ||L||


def steady_state(liouvillian: Liouvillian) -> SteadyState:
    """Unique null vector of ``L`` normalized to a density matrix.

    The eigenpair of smallest magnitude locates the null space and certifies
    uniqueness; a bordered linear solve then polishes the state. Raises
    :class:`NonUniqueSteadyStateError` when the second-smallest eigenvalue is
    below ``1e-10 * ||L||`` and :class:`NumericalError` when the final residual
    ``||L[rho]||_2`` exceeds 1e-9.
    """
    d = liouvillian.hilbert_dim
    lam, r = liouvillian.eigen
    by_mag = np.argsort(np.abs(lam))
    scale = liouvillian.norm
    null_ratio = float(np.abs(lam[by_mag[1]]) / scale) if len(lam) > 1 else np.inf
    if null_ratio < NULL_SPACE_RTOL:
        raise NonUniqueSteadyStateError(
            f"null space of L is degenerate: second eigenvalue {lam[by_mag[1]]:.3g} "
            f"vs ||L|| = {scale:.3g}"
        )
    rho = unvec(r[:, by_mag[0]], d)
    rho = rho / np.trace(rho)

    # polish: replace the equation for rho_00 with the trace condition
    a = liouvillian.matrix.copy()
    a[0, :] = vec(np.eye(d))
    b = np.zeros(d * d, dtype=complex)
    b[0] = 1.0
    try:
        polished = unvec(np.linalg.solve(a, b), d)
    except np.linalg.LinAlgError:
        polished = None

    def _finish(x):
        x = 0.5 * (x + x.conj().T)
        x = x / np.trace(x).real
        return x, float(np.linalg.norm(liouvillian.apply(x), 2))

    rho, res = _finish(rho)
    if polished is not None and np.all(np.isfinite(polished)):
        rho2, res2 = _finish(polished)
        if res2 <= res:
            rho, res = rho2, res2
    if res > RESIDUAL_TOL:
        raise NumericalError(f"steady-state residual {res:.3g} exceeds {RESIDUAL_TOL}")
    others = np.delete(lam, by_mag[0])
    gap = float(-others.real.max()) if len(others) else np.inf
    return SteadyState(rho, res, gap, null_ratio)


def propagator(liouvillian: Liouvillian, t: float) -> np.ndarray:
    """``expm(L t)`` by scaling and squaring."""
    if not t >= 0:
        raise ValidationError(f"time must be >= 0, got {t!r}")
    return sla.expm(liouvillian.matrix * t)


def propagate(liouvillian: Liouvillian, rho0: np.ndarray, t: float) -> np.ndarray:
    """Evolve ``rho0`` for a time ``t`` under the master equation."""
    rho0 = np.asarray(rho0)
    if rho0.shape != (liouvillian.hilbert_dim,) * 2:
        raise ValidationError(f"state has shape {rho0.shape}, expected {(liouvillian.hilbert_dim,) * 2}")
    return unvec(propagator(liouvillian, t) @ vec(rho0), liouvillian.hilbert_dim)
