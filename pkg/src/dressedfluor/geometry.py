"""Emitter layouts and the light-mediated pair couplings.

Lengths are dimensionless (multiplied by the wave number ``k``) and rates are
in units of the single-emitter decay rate, which is fixed to 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
from scipy.special import spherical_jn, spherical_yn

from .errors import DegenerateGeometryError, ValidationError

__all__ = [
    "LayoutMode",
    "EmitterLayout",
    "PairCouplings",
    "PairRegime",
    "StrongRegimeReport",
    "MAGIC_COS_THETA",
    "derive_pair_geometry",
    "coupling_gamma",
    "coupling_omega",
    "build_couplings",
    "validate_strong_regime",
]

#: cos(theta) at which 1 - 3 cos^2(theta) vanishes.
MAGIC_COS_THETA = 1.0 / np.sqrt(3.0)

_UNIT_TOL = 1e-12


class LayoutMode(str, Enum):
    GEOMETRIC = "geometric"
    PAIRWISE = "pairwise"


def _unit_vector(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ValidationError(f"{name} must be a finite 3-vector, got {v!r}")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > _UNIT_TOL:
        raise ValidationError(f"{name} must have unit norm (|v| = {norm!r})")
    return v


def normalized(v) -> np.ndarray:
    """Return ``v / |v|`` as a float array."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValidationError("cannot normalize a zero vector")
    return v / n


@dataclass(frozen=True)
class EmitterLayout:
    """Configuration of ``N`` emitters.

    Build instances through :meth:`geometric` or :meth:`pairwise` rather than
    the raw constructor.

    In geometric mode the pair distances and angles follow from
    ``positions`` and ``dipole_direction``. In pairwise mode ``pair_kr`` and
    ``pair_cos_theta`` are given directly and all emitters sit at the origin
    for the purpose of drive and detection phases.
    """

    mode: LayoutMode
    positions: np.ndarray
    dipole_direction: Optional[np.ndarray] = None
    pair_kr: Optional[np.ndarray] = None
    pair_cos_theta: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.positions.ndim != 2 or self.positions.shape[1] != 3 or len(self.positions) < 1:
            raise ValidationError("positions must be an (N, 3) array with N >= 1")
        if self.mode is LayoutMode.PAIRWISE:
            n = self.n_atoms
            for name in ("pair_kr", "pair_cos_theta"):
                m = getattr(self, name)
                if m is None or m.shape != (n, n):
                    raise ValidationError(f"{name} must be an {n}x{n} matrix")
                if not np.all(np.isfinite(m)):
                    raise ValidationError(f"{name} has non-finite entries")
                if not np.array_equal(m, m.T):
                    raise ValidationError(f"{name} must be exactly symmetric")
                if np.any(np.diag(m) != 0):
                    raise ValidationError(f"{name} must have a zero diagonal")
            off = ~np.eye(n, dtype=bool)
            if np.any(self.pair_kr[off] <= 0):
                raise DegenerateGeometryError("off-diagonal pair_kr entries must be > 0")
            if np.any(np.abs(self.pair_cos_theta) > 1):
                raise ValidationError("pair_cos_theta entries must lie in [-1, 1]")

    @classmethod
    def geometric(cls, positions, dipole_direction) -> "EmitterLayout":
        """Layout from explicit positions (units of 1/k) and a common dipole axis."""
        pos = np.array(positions, dtype=float)
        if pos.ndim == 1:
            pos = pos.reshape(1, -1)
        if not np.all(np.isfinite(pos)):
            raise ValidationError("positions must be finite")
        return cls(LayoutMode.GEOMETRIC, pos, _unit_vector(dipole_direction, "dipole_direction"))

    @classmethod
    def pairwise(cls, pair_kr, pair_cos_theta) -> "EmitterLayout":
        """Layout from pair distances ``k r_ij`` and pair angle cosines.

        ``pair_cos_theta`` may be a scalar, which is then applied to every pair.
        """
        kr = np.array(pair_kr, dtype=float)
        if kr.ndim != 2 or kr.shape[0] != kr.shape[1]:
            raise ValidationError("pair_kr must be a square matrix")
        n = kr.shape[0]
        ct = np.asarray(pair_cos_theta, dtype=float)
        if ct.ndim == 0:
            ct = np.full((n, n), float(ct))
            np.fill_diagonal(ct, 0.0)
        else:
            ct = np.array(ct)
        return cls(LayoutMode.PAIRWISE, np.zeros((n, 3)), None, kr, ct)

    @property
    def n_atoms(self) -> int:
        return len(self.positions)

    def scaled(self, factor: float) -> "EmitterLayout":
        """Copy with every distance multiplied by ``factor``."""
        if self.mode is LayoutMode.GEOMETRIC:
            return EmitterLayout.geometric(self.positions * factor, self.dipole_direction)
        return EmitterLayout.pairwise(self.pair_kr * factor, self.pair_cos_theta)


@dataclass(frozen=True)
class PairCouplings:
    """Collective decay matrix ``gamma`` and dipole shift matrix ``omega``."""

    gamma: np.ndarray
    omega: np.ndarray

    @property
    def n_atoms(self) -> int:
        return self.gamma.shape[0]


def derive_pair_geometry(layout: EmitterLayout):
    """Return ``(pair_kr, pair_cos_theta)`` for a layout.

    In pairwise mode the stored matrices are returned unchanged. In geometric
    mode ``pair_cos_theta`` holds ``|cos theta_ij|`` so both matrices are
    symmetric.
    """
    if layout.mode is LayoutMode.PAIRWISE:
        return layout.pair_kr, layout.pair_cos_theta
    pos = layout.positions
    n = len(pos)
    sep = pos[:, None, :] - pos[None, :, :]
    kr = np.linalg.norm(sep, axis=-1)
    off = ~np.eye(n, dtype=bool)
    if np.any(kr[off] == 0):
        i, j = np.argwhere((kr == 0) & off)[0]
        raise DegenerateGeometryError(f"emitters {i} and {j} are coincident")
    cos_theta = np.zeros((n, n))
    cos_theta[off] = (sep @ layout.dipole_direction)[off] / kr[off]
    # the sign flips between (i, j) and (j, i); only cos^2 enters the couplings
    cos_theta = np.clip(np.abs(cos_theta), 0.0, 1.0)
    return kr, cos_theta


def _check_kr(kr):
    kr = np.asarray(kr, dtype=float)
    if np.any(~(kr > 0)):
        raise ValidationError(f"kr must be > 0, got {kr!r}")
    return kr


def _angular_factors(cos_theta):
    c2 = np.square(np.asarray(cos_theta, dtype=float))
    short = 1 - 3 * c2
    # within rounding of the magic angle the short-range term vanishes exactly
    short = np.where(np.abs(short) <= 8 * np.finfo(float).eps, 0.0, short)
    return 1 - c2, short


def coupling_gamma(kr, cos_theta):
    """Collective decay rate between two emitters (units of the single-atom rate).

    Tends to 1 as ``kr -> 0`` for any orientation; ``kr <= 0`` is rejected.
    Written with spherical Bessel functions, ``sin(x)/x = j0(x)`` and
    ``cos(x)/x**2 - sin(x)/x**3 = -j1(x)/x``, which stay accurate at small
    ``kr`` where the explicit form cancels.
    """
    kr = _check_kr(kr)
    far, short = _angular_factors(cos_theta)
    return 1.5 * far * spherical_jn(0, kr) - 1.5 * short * spherical_jn(1, kr) / kr


def coupling_omega(kr, cos_theta):
    """Coherent dipole-dipole shift between two emitters.

    Diverges like ``kr**-3`` at short distance unless ``cos_theta`` is at the
    magic value, where only the ``-cos(kr) / (2 kr)`` term survives.
    """
    kr = _check_kr(kr)
    far, short = _angular_factors(cos_theta)
    # -cos(x)/x = y0(x);  sin(x)/x**2 + cos(x)/x**3 = -y1(x)/x
    return 0.75 * far * spherical_yn(0, kr) - 0.75 * short * spherical_yn(1, kr) / kr


def build_couplings(layout: EmitterLayout) -> PairCouplings:
    kr, cos_theta = derive_pair_geometry(layout)
    n = layout.n_atoms
    gamma = np.eye(n)
    omega = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    if len(iu[0]):
        g = coupling_gamma(kr[iu], cos_theta[iu])
        o = coupling_omega(kr[iu], cos_theta[iu])
        gamma[iu] = g
        gamma[iu[::-1]] = g
        omega[iu] = o
        omega[iu[::-1]] = o
    return PairCouplings(gamma, omega)


@dataclass(frozen=True)
class PairRegime:
    i: int
    j: int
    interaction: float  # |omega_ij|
    gamma_deviation: float  # |1 - gamma_ij|
    driving_ratio: float  # rabi^2 / (1 + 4 |omega_ij|^2)
    strong_interaction: bool
    gamma_near_unity: bool
    strong_driving: bool

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class StrongRegimeReport:
    rabi: float
    pairs: List[PairRegime] = field(default_factory=list)
    interaction_factor: float = 10.0
    gamma_window: float = 0.01
    driving_factor: float = 10.0

    @property
    def all_strong(self) -> bool:
        return all(p.strong_interaction and p.gamma_near_unity and p.strong_driving for p in self.pairs)

    def as_dict(self) -> dict:
        return {
            "rabi": self.rabi,
            "interaction_factor": self.interaction_factor,
            "gamma_window": self.gamma_window,
            "driving_factor": self.driving_factor,
            "pairs": [p.as_dict() for p in self.pairs],
        }


def validate_strong_regime(
    couplings: PairCouplings,
    rabi: float,
    interaction_factor: float = 10.0,
    gamma_window: float = 0.01,
    driving_factor: float = 10.0,
) -> StrongRegimeReport:
    """Annotate each pair with strong-interaction / strong-driving flags.

    Flags use ``|omega_ij| >= interaction_factor``, ``|1 - gamma_ij| <
    gamma_window`` and ``rabi^2 > driving_factor * (1 + 4 omega_ij^2)``. Raw
    ratios are always reported so other cutoffs can be applied afterwards.
    Nothing is raised for weak configurations.
    """
    if not rabi > 0:
        raise ValidationError("rabi must be > 0")
    pairs = []
    n = couplings.n_atoms
    for i in range(n):
        for j in range(i + 1, n):
            o = abs(float(couplings.omega[i, j]))
            dev = abs(1.0 - float(couplings.gamma[i, j]))
            ratio = rabi**2 / (1.0 + 4.0 * o**2)
            pairs.append(
                PairRegime(
                    i, j, o, dev, ratio,
                    strong_interaction=o >= interaction_factor,
                    gamma_near_unity=dev < gamma_window,
                    strong_driving=ratio > driving_factor,
                )
            )
    return StrongRegimeReport(float(rabi), pairs, interaction_factor, gamma_window, driving_factor)
