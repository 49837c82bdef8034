"""Collective dressed levels and the transitions that shape the spectrum.

Dressed levels are eigenstates of the rotating-frame Hamiltonian, sorted by
energy. A spectral line at ``w = E_a - E_b`` requires a non-vanishing
emission amplitude ``M_ab = <u_a| E^dag |u_b>``; the graph of non-vanishing
amplitudes splits the levels into blocks that never exchange photons.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse.csgraph import connected_components

from .dynamics import DriveParameters
from .errors import ValidationError
from .qops import basis_label, excitation_counts, permutation_operator, total_number
from .spectrum import FieldOperator, PeakSet

__all__ = [
    "DressedLevels",
    "TransitionTable",
    "CouplingBlocks",
    "PeakMatch",
    "PeakAssignment",
    "CollectiveState",
    "ManifoldEntry",
    "ManifoldReport",
    "dressed_levels",
    "symmetry_group",
    "collective_basis_lab",
    "transition_table",
    "coupling_blocks",
    "assign_peaks",
    "manifold_report",
    "level_diagram",
]

AMPLITUDE_RTOL = 1e-6


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude component made real positive
    idx = np.argmax(np.abs(vectors), axis=0)
    lead = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.abs(lead) / lead)


@dataclass(frozen=True)
class DressedLevels:
    energies: np.ndarray
    vectors: np.ndarray  # column i is |u_i>

    @property
    def labels(self) -> List[int]:
        return list(range(len(self.energies)))

    def degenerate_groups(self, tol: float = 1e-8) -> List[List[int]]:
        """Runs of levels whose consecutive energies differ by <= ``tol``."""
        groups = [[0]]
        for i in range(1, len(self.energies)):
            if self.energies[i] - self.energies[i - 1] <= tol:
                groups[-1].append(i)
            else:
                groups.append([i])
        return groups

    def projector(self, indices: Sequence[int]) -> np.ndarray:
        v = self.vectors[:, list(indices)]
        return v @ v.conj().T


def dressed_levels(hamiltonian: np.ndarray) -> DressedLevels:
    """Diagonalize a Hermitian Hamiltonian; energies ascending, phases fixed."""
    h = np.asarray(hamiltonian)
    scale = max(1.0, float(np.abs(h).max()))
    if np.abs(h - h.conj().T).max() > 1e-10 * scale:
        raise ValidationError("Hamiltonian is not Hermitian")
    e, v = np.linalg.eigh(h)
    return DressedLevels(e, _fix_phases(v))


@dataclass(frozen=True)
class TransitionTable:
    delta: np.ndarray  # delta[i, j] = E_i - E_j
    amplitude: np.ndarray  # <u_i| E^dag |u_j>

    def allowed(self, floor: Optional[float] = None) -> np.ndarray:
        """Boolean mask of transitions with ``|M_ij| >= floor``."""
        return np.abs(self.amplitude) >= self.floor(floor)

    def floor(self, floor: Optional[float] = None) -> float:
        if floor is not None:
            return float(floor)
        return AMPLITUDE_RTOL * float(np.abs(self.amplitude).max())

    def as_dict(self) -> dict:
        return {
            "delta": self.delta.tolist(),
            "amplitude_abs": np.abs(self.amplitude).tolist(),
            "amplitude_re": self.amplitude.real.tolist(),
            "amplitude_im": self.amplitude.imag.tolist(),
        }


def transition_table(levels: DressedLevels, field_op: FieldOperator) -> TransitionTable:
    v = levels.vectors
    if field_op.operator.shape != (v.shape[0],) * 2:
        raise ValidationError("field operator and dressed levels have different dimensions")
    e = levels.energies
    delta = e[:, None] - e[None, :]
    return TransitionTable(delta, v.conj().T @ field_op.operator @ v)


@dataclass(frozen=True)
class CouplingBlocks:
    groups: Tuple[Tuple[int, ...], ...]
    threshold: float

    def block_of(self, level: int) -> int:
        for k, g in enumerate(self.groups):
            if level in g:
                return k
        raise ValidationError(f"level {level} not in any block")

    def as_sets(self) -> List[set]:
        return [set(g) for g in self.groups]

    def as_dict(self) -> dict:
        return {"threshold": self.threshold, "groups": [list(g) for g in self.groups]}


def coupling_blocks(table: TransitionTable, threshold: Optional[float] = None) -> CouplingBlocks:
    """Connected components of the graph with edges where ``|M_ij| >= threshold``.

    ``threshold`` defaults to ``1e-6 * max |M|``.
    """
    thr = table.floor(threshold)
    if not thr > 0:
        raise ValidationError("threshold must be > 0")
    adj = table.allowed(thr)
    adj = adj | adj.T
    _, labels = connected_components(adj.astype(int), directed=False)
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    ordered = sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])
    return CouplingBlocks(tuple(ordered), thr)


@dataclass(frozen=True)
class PeakMatch:
    center: float
    pairs: Tuple[Tuple[int, int], ...]  # (a, b): line at E_a - E_b

    @property
    def matched(self) -> bool:
        return bool(self.pairs)

    @property
    def is_central(self) -> bool:
        return any(a == b for a, b in self.pairs)


@dataclass(frozen=True)
class PeakAssignment:
    matches: Tuple[PeakMatch, ...]
    unrealized: Tuple[Tuple[int, int], ...]  # allowed transitions with no peak
    tolerance: float
    amplitude_floor: float

    @property
    def unmatched(self) -> List[float]:
        return [m.center for m in self.matches if not m.matched]

    @property
    def all_matched(self) -> bool:
        return all(m.matched for m in self.matches)

    def as_dict(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "amplitude_floor": self.amplitude_floor,
            "matches": [
                {"center": m.center, "pairs": [list(p) for p in m.pairs], "central": m.is_central}
                for m in self.matches
            ],
            "unmatched": self.unmatched,
            "unrealized": [list(p) for p in self.unrealized],
        }


def assign_peaks(
    peaks: PeakSet,
    table: TransitionTable,
    tolerance: float = 1.0,
    amplitude_floor: Optional[float] = None,
    window: Optional[Tuple[float, float]] = None,
) -> PeakAssignment:
    """Match each peak centre to transitions ``E_a - E_b`` with allowed amplitude.

    The central peak collects the ``a == b`` family. Allowed off-diagonal
    transitions inside ``window`` (default: the span of the peak centres
    widened by ``tolerance``) that no peak matches are listed as unrealized.
    """
    floor = table.floor(amplitude_floor)
    allowed = table.allowed(floor)
    matches = []
    hit = np.zeros_like(allowed)
    for p in peaks:
        close = (np.abs(table.delta - p.center) <= tolerance) & allowed
        hit |= close
        pairs = tuple((int(a), int(b)) for a, b in np.argwhere(close))
        matches.append(PeakMatch(p.center, pairs))
    if window is None:
        c = peaks.centers
        window = (c.min() - tolerance, c.max() + tolerance) if len(c) else (0.0, 0.0)
    in_window = (table.delta >= window[0]) & (table.delta <= window[1])
    missing = allowed & ~hit & in_window & ~np.eye(len(allowed), dtype=bool)
    unrealized = tuple((int(a), int(b)) for a, b in np.argwhere(missing))
    return PeakAssignment(tuple(matches), unrealized, float(tolerance), floor)


def symmetry_group(hamiltonian: np.ndarray, n_atoms: int, atol: float = 1e-10) -> List[Tuple[int, ...]]:
    """Site permutations that leave ``hamiltonian`` invariant."""
    scale = max(1.0, float(np.abs(hamiltonian).max()))
    out = []
    for perm in itertools.permutations(range(n_atoms)):
        p = permutation_operator(perm, n_atoms)
        if np.abs(p @ hamiltonian @ p.T - hamiltonian).max() <= atol * scale:
            out.append(perm)
    return out


def _transpositions(group, n):
    out = []
    for perm in group:
        moved = [k for k in range(n) if perm[k] != k]
        if len(moved) == 2:
            out.append(tuple(moved))
    return out


@dataclass(frozen=True)
class CollectiveState:
    excitation: int
    energy: float
    vector: np.ndarray
    symmetry: str  # "symmetric", "antisymmetric", "mixed" or "none"
    swap: Optional[Tuple[int, int]]  # reference exchange used for parity
    swap_parity: Optional[int]  # +1 / -1 under the reference exchange

    def components(self, n_atoms: int, atol: float = 1e-12) -> dict:
        """Non-zero amplitudes keyed by ket label."""
        return {
            basis_label(i, n_atoms): complex(c)
            for i, c in enumerate(self.vector)
            if abs(c) > atol
        }


def collective_basis_lab(hamiltonian_lab: np.ndarray, n_atoms: int) -> List[CollectiveState]:
    """Eigenstates of an excitation-conserving Hamiltonian, sector by sector.

    States are labelled by excitation number and by their behaviour under the
    exchange symmetries of the Hamiltonian. Inside degenerate subspaces the
    basis is chosen to diagonalize a reference exchange, preferring the swap
    of sites 0 and 1 when it is a symmetry.
    """
    h = np.asarray(hamiltonian_lab)
    d = 2**n_atoms
    if h.shape != (d, d):
        raise ValidationError(f"expected a {d}x{d} Hamiltonian")
    num = total_number(n_atoms)
    scale = max(1.0, float(np.abs(h).max()))
    if np.abs(h @ num - num @ h).max() > 1e-10 * scale:
        raise ValidationError("Hamiltonian does not conserve the excitation number")
    group = symmetry_group(h, n_atoms)
    swaps = _transpositions(group, n_atoms)
    ref = (0, 1) if (0, 1) in swaps else (swaps[0] if swaps else None)
    swap_ops = {s: permutation_operator(_swap_perm(s, n_atoms), n_atoms) for s in swaps}
    counts = excitation_counts(n_atoms)
    states = []
    for k in range(n_atoms + 1):
        idx = np.flatnonzero(counts == k)
        e, v = np.linalg.eigh(h[np.ix_(idx, idx)])
        full = np.zeros((d, len(idx)), dtype=complex)
        full[idx] = v
        if ref is not None:
            full = _diagonalize_in_degenerate(e, full, swap_ops[ref], 1e-9 * scale)
        full = _fix_phases(full)
        for col in range(len(idx)):
            vec_ = full[:, col]
            parities = {s: float(np.real(vec_.conj() @ swap_ops[s] @ vec_)) for s in swaps}
            if not swaps:
                sym = "none"
            elif all(abs(p - 1) < 1e-8 for p in parities.values()):
                sym = "symmetric"
            elif all(abs(p + 1) < 1e-8 for p in parities.values()):
                sym = "antisymmetric"
            else:
                sym = "mixed"
            par = None
            if ref is not None and abs(abs(parities[ref]) - 1) < 1e-8:
                par = int(round(parities[ref]))
            states.append(CollectiveState(k, float(e[col]), vec_, sym, ref, par))
    return states


def _swap_perm(pair, n):
    perm = list(range(n))
    a, b = pair
    perm[a], perm[b] = b, a
    return tuple(perm)


def _diagonalize_in_degenerate(energies, vectors, op, tol):
    out = vectors.copy()
    start = 0
    while start < len(energies):
        stop = start + 1
        while stop < len(energies) and energies[stop] - energies[stop - 1] <= tol:
            stop += 1
        if stop - start > 1:
            block = out[:, start:stop]
            sub = block.conj().T @ op @ block
            _, rot = np.linalg.eigh(0.5 * (sub + sub.conj().T))
            out[:, start:stop] = block @ rot[:, ::-1]  # +1 parity first
        start = stop
    return out


@dataclass(frozen=True)
class ManifoldEntry:
    index: int
    excitation: int
    photon_offset: int  # pairs with |n - excitation>
    symmetry: str

    @property
    def photon_label(self) -> str:
        return "|n>" if self.photon_offset == 0 else f"|n-{self.photon_offset}>"


@dataclass(frozen=True)
class ManifoldReport:
    entries: Tuple[ManifoldEntry, ...]
    dimension: int
    rabi: float
    detuning: float
    manifold_spacing: str = "omega_L"

    def as_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "manifold_spacing": self.manifold_spacing,
            "rabi": self.rabi,
            "detuning": self.detuning,
            "entries": [
                {
                    "index": e.index,
                    "excitation": e.excitation,
                    "photon_state": e.photon_label,
                    "symmetry": e.symmetry,
                }
                for e in self.entries
            ],
        }


def manifold_report(states: Sequence[CollectiveState], drive: DriveParameters) -> ManifoldReport:
    """Photon bookkeeping that keeps the total excitation fixed within a manifold.

    A collective state with ``k`` excited emitters pairs with ``|n - k>``
    photons; neighbouring manifolds are one laser photon apart.
    """
    entries = tuple(ManifoldEntry(i, s.excitation, s.excitation, s.symmetry) for i, s in enumerate(states))
    return ManifoldReport(entries, len(states), float(drive.rabi), float(drive.detuning))


def level_diagram(levels: DressedLevels, table: TransitionTable, blocks: CouplingBlocks) -> dict:
    """Plot data for two neighbouring manifolds and the allowed transitions.

    Each transition runs from level ``upper`` in manifold ``n`` to level
    ``lower`` in manifold ``n-1``; its spectral position is ``E_lower - E_upper``
    in the convention of :mod:`dressedfluor.spectrum`.
    """
    allowed = table.allowed(blocks.threshold)
    transitions = []
    for a, b in np.argwhere(allowed):
        transitions.append(
            {
                "upper": int(b),
                "lower": int(a),
                "frequency": float(table.delta[a, b]),
                "amplitude": float(abs(table.amplitude[a, b])),
                "block": blocks.block_of(int(a)),
            }
        )
    return {
        "manifold_spacing": "omega_L",
        "manifolds": [
            {"name": "n", "energies": levels.energies.tolist()},
            {"name": "n-1", "energies": levels.energies.tolist()},
        ],
        "blocks": [list(g) for g in blocks.groups],
        "transitions": transitions,
    }
