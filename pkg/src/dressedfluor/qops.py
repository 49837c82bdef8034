"""Dense operators on the 2**N dimensional space of N two-level emitters.

Basis kets are ``|s_{N-1} ... s_0>`` with ``s = 0`` for the ground state and
``s = 1`` for the excited state; site 0 is the least significant bit, so the
integer index of a ket is ``sum(s_k * 2**k)``. Operators are plain complex
``numpy`` arrays.
"""
from __future__ import annotations

import numpy as np

from .errors import ValidationError

__all__ = [
    "LOWERING",
    "site_lowering",
    "site_raising",
    "site_number",
    "total_number",
    "excitation_counts",
    "basis_label",
    "basis_index",
    "permutation_operator",
    "expectation",
    "vec",
    "unvec",
    "check_density_matrix",
]

#: single-site lowering block, maps |up> to |down>
LOWERING = np.array([[0, 1], [0, 0]], dtype=complex)


def _check_site(i: int, n: int):
    if n < 1:
        raise ValidationError(f"atom count must be >= 1, got {n}")
    if not 0 <= i < n:
        raise ValidationError(f"site index {i} out of range for N={n}")


def site_lowering(i: int, n: int) -> np.ndarray:
    """sigma^- acting on site ``i`` of ``n`` emitters."""
    _check_site(i, n)
    # kron places its first factor on the most significant bit
    return np.kron(np.kron(np.eye(2 ** (n - 1 - i)), LOWERING), np.eye(2**i))


def site_raising(i: int, n: int) -> np.ndarray:
    return site_lowering(i, n).conj().T


def site_number(i: int, n: int) -> np.ndarray:
    """Occupation projector sigma^+ sigma^- of site ``i``."""
    _check_site(i, n)
    occ = (np.arange(2**n) >> i) & 1
    return np.diag(occ.astype(complex))


def excitation_counts(n: int) -> np.ndarray:
    """Number of excited emitters in each basis ket."""
    idx = np.arange(2**n)
    return np.array([bin(k).count("1") for k in idx])


def total_number(n: int) -> np.ndarray:
    return np.diag(excitation_counts(n).astype(complex))


def basis_label(index: int, n: int) -> str:
    """Ket label such as ``'↑↓↓'`` (leftmost character is site ``n-1``)."""
    return "".join("↑" if (index >> k) & 1 else "↓" for k in reversed(range(n)))


def basis_index(label: str) -> int:
    """Inverse of :func:`basis_label`; also accepts ``'u'/'d'`` or ``'1'/'0'``."""
    up = {"↑", "u", "1"}
    down = {"↓", "d", "0"}
    idx = 0
    for ch in label:
        if ch not in up | down:
            raise ValidationError(f"bad ket label {label!r}")
        idx = 2 * idx + (ch in up)
    return idx


def permutation_operator(perm, n: int) -> np.ndarray:
    """Unitary that moves the state of site ``k`` to site ``perm[k]``."""
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise ValidationError(f"{perm!r} is not a permutation of range({n})")
    d = 2**n
    p = np.zeros((d, d))
    for idx in range(d):
        out = 0
        for k in range(n):
            if (idx >> k) & 1:
                out |= 1 << perm[k]
        p[out, idx] = 1.0
    return p


def expectation(op: np.ndarray, rho: np.ndarray) -> complex:
    """Tr(op @ rho)."""
    op = np.asarray(op)
    rho = np.asarray(rho)
    if op.shape != rho.shape or op.ndim != 2:
        raise ValidationError(f"dimension mismatch: {op.shape} vs {rho.shape}")
    return complex(np.einsum("ij,ji->", op, rho))


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape(d, d, order="F")


def check_density_matrix(rho: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    """Raise :class:`ValidationError` unless ``rho`` is a valid density matrix."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError("density matrix must be square")
    d = rho.shape[0]
    if d & (d - 1):
        raise ValidationError(f"dimension {d} is not a power of two")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > atol:
        raise ValidationError(f"density matrix not Hermitian (deviation {herm:.3g})")
    tr = np.trace(rho)
    if abs(tr - 1) > atol:
        raise ValidationError(f"density matrix trace is {tr:.12g}")
    lo = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
    if lo < -atol:
        raise ValidationError(f"density matrix has negative eigenvalue {lo:.3g}")
    return rho
