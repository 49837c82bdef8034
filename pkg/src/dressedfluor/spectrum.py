"""First-order field correlation, one-photon spectrum and sideband detection.

Frequencies are measured from the laser frequency in units of the
single-emitter decay rate. The spectrum is

    S(w) = integral over tau of g1(tau) * exp(-1j * w * tau)

with g1 the normalized steady-state correlation ``<E(0) E^dag(tau)>``,
``E^dag = sum_j s-_j exp(-i k n.r_j)``. With this sign convention a detuned
emitter (``detuning = omega_a - omega_L``) radiates at ``w = -detuning``.
The elastic (coherent) part, the long-time plateau of g1, is reported
separately as ``coherent_weight`` and is not part of ``values``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
import scipy.fft
import scipy.linalg as sla
from scipy.integrate import trapezoid
from scipy.signal import find_peaks, peak_widths

from .dynamics import Liouvillian, SteadyState, propagator
from .errors import NoEmissionError, PlateauNotReachedError, ValidationError
from .geometry import EmitterLayout, LayoutMode, normalized
from .qops import site_lowering, vec

__all__ = [
    "DEFAULT_TAU_SPACING",
    "DEFAULT_TAU_LENGTH",
    "FieldOperator",
    "CorrelationTrace",
    "SpectrumMethod",
    "Spectrum",
    "Peak",
    "PeakSet",
    "field_operator",
    "tau_grid",
    "g1_correlation",
    "spectrum_fourier",
    "spectrum_eigen",
    "detect_peaks",
]

DEFAULT_TAU_SPACING = 2.5e-4
DEFAULT_TAU_LENGTH = 40.0
PLATEAU_TOL = 1e-4
COND_LIMIT = 1e8


@dataclass(frozen=True)
class FieldOperator:
    """Far-field operator ``E^dag(n) = sum_j s-_j exp(-i n.r_j)``."""

    direction: np.ndarray
    operator: np.ndarray

    @property
    def adjoint(self) -> np.ndarray:
        return self.operator.conj().T


def _orthogonal_axis(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    trial = np.eye(3)[np.argmin(np.abs(v))]
    return normalized(np.cross(v, trial))


def field_operator(layout: EmitterLayout, direction=None) -> FieldOperator:
    """Detection operator for observation direction ``direction``.

    Defaults to an axis orthogonal to the dipoles (x for pairwise layouts,
    where every emitter sits at the origin and the direction is irrelevant).
    """
    if direction is None:
        if layout.mode is LayoutMode.GEOMETRIC:
            direction = _orthogonal_axis(layout.dipole_direction)
        else:
            direction = (1.0, 0.0, 0.0)
    n_hat = np.asarray(direction, dtype=float)
    if n_hat.shape != (3,) or abs(np.linalg.norm(n_hat) - 1) > 1e-12:
        raise ValidationError("observation direction must be a unit 3-vector")
    n = layout.n_atoms
    phases = np.exp(-1j * layout.positions @ n_hat)
    op = sum(phases[j] * site_lowering(j, n) for j in range(n))
    return FieldOperator(n_hat, op)


def tau_grid(spacing: float = DEFAULT_TAU_SPACING, length: float = DEFAULT_TAU_LENGTH) -> np.ndarray:
    """Uniform delay grid ``0, spacing, ..., length``."""
    if not (spacing > 0 and length > 0):
        raise ValidationError("tau spacing and length must be > 0")
    return np.arange(int(round(length / spacing)) + 1) * spacing


@dataclass(frozen=True)
class CorrelationTrace:
    tau: np.ndarray
    values: np.ndarray
    steady: SteadyState
    plateau: complex  # long-time limit of g1 (coherent fraction)
    denominator: float  # <E E^dag> in the steady state

    @property
    def spacing(self) -> float:
        return float(self.tau[1] - self.tau[0])


def _check_uniform(tau) -> float:
    tau = np.asarray(tau, dtype=float)
    if tau.ndim != 1 or len(tau) < 2 or tau[0] != 0:
        raise ValidationError("tau grid must be 1-D, start at 0 and have >= 2 points")
    h = tau[1] - tau[0]
    if h <= 0 or np.max(np.abs(np.diff(tau) - h)) > 1e-9 * max(h, 1.0):
        raise ValidationError("tau grid must be uniformly spaced and increasing")
    return float(h)


def _trace_weights(field_op: FieldOperator) -> np.ndarray:
    # Tr(E^dag Y) == w @ vec(Y)
    return vec(field_op.operator.T)


def g1_correlation(
    liouvillian: Liouvillian,
    steady: SteadyState,
    field_op: FieldOperator,
    tau: Optional[np.ndarray] = None,
    block: Optional[int] = None,
) -> CorrelationTrace:
    """Normalized ``g1(tau)`` from the quantum regression theorem.

    The operator ``rho_ss E`` is propagated with ``expm(L dtau)``. Samples are
    produced in blocks: row vectors ``w^T P^k`` for ``k < block`` are formed
    once and the state is advanced by ``P^block`` between blocks, which keeps
    the cost linear in the number of delays.
    """
    if tau is None:
        tau = tau_grid()
    h = _check_uniform(tau)
    d = liouvillian.hilbert_dim
    if field_op.operator.shape != (d, d):
        raise ValidationError("field operator and Liouvillian dimensions differ")
    x = vec(steady.rho @ field_op.adjoint)
    w = _trace_weights(field_op)
    den = w @ x
    if abs(den) < 1e-14:
        raise NoEmissionError("steady-state field intensity <E E^dag> vanishes")
    n_tau = len(tau)
    n_l = liouvillian.dim
    if block is None:
        block = int(np.clip(2**22 // (n_l * 16), 1, 512))
    block = max(1, min(block, n_tau))
    p = propagator(liouvillian, h)
    rows = np.empty((block, n_l), dtype=complex)
    rows[0] = w
    for k in range(1, block):
        rows[k] = rows[k - 1] @ p
    p_block = propagator(liouvillian, h * block)
    out = np.empty(n_tau, dtype=complex)
    y = x
    for start in range(0, n_tau, block):
        stop = min(start + block, n_tau)
        out[start:stop] = rows[: stop - start] @ y
        y = p_block @ y
    values = out / den
    plateau = (w @ vec(steady.rho)) * np.trace(steady.rho @ field_op.adjoint) / den
    return CorrelationTrace(np.asarray(tau, dtype=float), values, steady, complex(plateau), float(den.real))


class SpectrumMethod(str, Enum):
    WINDOWED_FOURIER = "WindowedFourier"
    EIGEN_DECOMPOSITION = "EigenDecomposition"


@dataclass(frozen=True)
class Spectrum:
    omega: np.ndarray
    values: np.ndarray
    coherent_weight: float
    method: SpectrumMethod

    @property
    def spacing(self) -> float:
        return float(self.omega[1] - self.omega[0])

    def with_elastic_spike(self) -> np.ndarray:
        """Values with the coherent weight added as a one-bin spike at w = 0.

        Only meant for plotting.
        """
        out = self.values.copy()
        k = int(np.argmin(np.abs(self.omega)))
        out[k] += 2 * np.pi * self.coherent_weight / self.spacing
        return out

    def integrated_weight(self) -> float:
        """Trapezoidal estimate of ``integral S dw / 2 pi``."""
        return float(trapezoid(self.values, self.omega) / (2 * np.pi))


def _required_length(trace: CorrelationTrace, tol: float) -> float:
    dev = np.abs(trace.values - trace.plateau)
    t = trace.tau
    half = len(t) // 2
    a = dev[half : half + max(1, half // 20)].max()
    b = dev[-max(1, half // 20):].max()
    span = t[-1] - t[half]
    if a <= b or span <= 0:
        return math.inf
    rate = math.log(a / b) / span
    return float(t[-1] + math.log(b / tol) / rate)


def spectrum_fourier(
    trace: CorrelationTrace,
    omega_max: float = 700.0,
    omega_spacing: float = 0.05,
    plateau_tol: float = PLATEAU_TOL,
) -> Spectrum:
    """Incoherent spectrum by discrete Fourier transform of a g1 trace.

    The trace must have settled to within ``plateau_tol`` of its long-time
    limit at the last delay. The level reached at the end of the window is
    subtracted (it differs from the exact plateau only by modes too slow for
    the window to resolve), the trace is continued to negative delays by
    ``g1(-tau) = conj(g1(tau))`` and summed with the trapezoidal rule. The
    output grid is ``2 pi k / (M dtau)`` for a zero-padded length ``M``
    chosen so that the spacing does not exceed ``omega_spacing``.
    """
    h = _check_uniform(trace.tau)
    dev = abs(trace.values[-1] - trace.plateau)
    if not dev < plateau_tol:
        req = _required_length(trace, plateau_tol)
        raise PlateauNotReachedError(
            f"g1 is still {dev:.3g} from its plateau at tau = {trace.tau[-1]:g}; "
            f"a window of about {req:.3g} is required",
            required_length=req,
        )
    if not (omega_max > 0 and omega_spacing > 0):
        raise ValidationError("omega_max and omega_spacing must be > 0")
    if omega_max >= np.pi / h:
        raise ValidationError(f"omega_max {omega_max} exceeds the Nyquist limit {np.pi / h:.6g}")
    inc = trace.values - trace.values[-1]
    n = len(inc)
    m = scipy.fft.next_fast_len(max(2 * n, int(math.ceil(2 * np.pi / (omega_spacing * h)))))
    f = scipy.fft.fft(inc, m)
    two_sided = f + f.conj() - inc[0].real
    k_max = int(math.floor(omega_max * m * h / (2 * np.pi)))
    k = np.arange(-k_max, k_max + 1)
    omega = 2 * np.pi * k / (m * h)
    values = h * two_sided[k % m].real
    return Spectrum(omega, values, abs(trace.plateau), SpectrumMethod.WINDOWED_FOURIER)


def _resolvent_spectrum(liouvillian, steady, x, w, den, omega, chunk=256):
    # deflate the steady-state mode: L - |rho><1| has the same nonzero spectrum
    d = liouvillian.hilbert_dim
    rho_v = vec(steady.rho)
    one = vec(np.eye(d))
    x_inc = x - rho_v * (one @ x)
    a = liouvillian.matrix - np.outer(rho_v, one)
    eye = np.eye(liouvillian.dim)
    out = np.empty(len(omega))
    for start in range(0, len(omega), chunk):
        om = omega[start : start + chunk]
        mats = 1j * om[:, None, None] * eye - a
        y = np.linalg.solve(mats, np.broadcast_to(x_inc, (len(om), len(x_inc)))[..., None])[..., 0]
        out[start : start + len(om)] = 2 * (y @ w / den).real
    return out


def spectrum_eigen(
    liouvillian: Liouvillian,
    steady: SteadyState,
    field_op: FieldOperator,
    omega: Sequence[float],
    cond_limit: float = COND_LIMIT,
) -> Spectrum:
    """Closed-form spectrum as a sum of complex Lorentzians.

    ``rho_ss E`` is expanded in Liouvillian eigenmodes; each mode ``lambda_k``
    with weight ``c_k`` contributes ``2 Re c_k / (i w - lambda_k)``. The
    steady-state mode is excluded and its weight is the coherent fraction.
    When the eigenvector matrix is too ill-conditioned the spectrum is
    evaluated from resolvent solves instead and a warning is issued.
    """
    omega = np.asarray(omega, dtype=float)
    x = vec(steady.rho @ field_op.adjoint)
    w = _trace_weights(field_op)
    den = w @ x
    if abs(den) < 1e-14:
        raise NoEmissionError("steady-state field intensity <E E^dag> vanishes")
    lam, r = liouvillian.eigen
    k0 = int(np.argmin(np.abs(lam)))
    coherent = abs((w @ vec(steady.rho)) * np.trace(steady.rho @ field_op.adjoint) / den)
    cond = np.linalg.cond(r)
    if not cond < cond_limit:
        warnings.warn(
            f"Liouvillian eigenvectors are ill-conditioned (cond = {cond:.3g}); "
            "falling back to resolvent solves",
            RuntimeWarning,
            stacklevel=2,
        )
        values = _resolvent_spectrum(liouvillian, steady, x, w, den, omega)
        return Spectrum(omega, values, coherent, SpectrumMethod.EIGEN_DECOMPOSITION)
    c = sla.solve(r, x) * (w @ r) / den
    keep = np.ones(len(lam), dtype=bool)
    keep[k0] = False
    keep &= c != 0
    lam_k, c_k = lam[keep], c[keep]
    values = np.empty(len(omega))
    chunk = max(1, 2**22 // max(1, len(lam_k)))
    for start in range(0, len(omega), chunk):
        om = omega[start : start + chunk]
        values[start : start + len(om)] = 2 * (c_k / (1j * om[:, None] - lam_k)).sum(axis=1).real
    return Spectrum(omega, values, coherent, SpectrumMethod.EIGEN_DECOMPOSITION)


@dataclass(frozen=True)
class Peak:
    center: float
    height: float
    half_width: float
    prominence: float  # decades

    def as_dict(self) -> dict:
        return {
            "center": self.center,
            "height": self.height,
            "half_width": self.half_width,
            "prominence": self.prominence,
        }


@dataclass(frozen=True)
class PeakSet:
    peaks: tuple = ()

    def __post_init__(self):
        centers = [p.center for p in self.peaks]
        if any(b <= a for a, b in zip(centers, centers[1:])):
            raise ValidationError("peak centers must be strictly increasing")

    def __len__(self):
        return len(self.peaks)

    def __iter__(self):
        return iter(self.peaks)

    def __getitem__(self, i):
        return self.peaks[i]

    @property
    def centers(self) -> np.ndarray:
        return np.array([p.center for p in self.peaks])

    def central(self, tolerance: float = 1.0) -> Optional[Peak]:
        """Peak closest to w = 0, if it lies within ``tolerance``."""
        if not self.peaks:
            return None
        p = min(self.peaks, key=lambda q: abs(q.center))
        return p if abs(p.center) <= tolerance else None

    def sidebands(self, tolerance: float = 1.0) -> List[Peak]:
        c = self.central(tolerance)
        return [p for p in self.peaks if p is not c]

    def in_window(self, lo: float, hi: float) -> List[Peak]:
        return [p for p in self.peaks if lo <= p.center <= hi]

    def to_records(self) -> List[dict]:
        return [p.as_dict() for p in self.peaks]

    @classmethod
    def from_records(cls, records) -> "PeakSet":
        return cls(tuple(Peak(**{k: float(r[k]) for k in ("center", "height", "half_width", "prominence")}) for r in records))


def detect_peaks(
    spectrum: Spectrum,
    min_prominence: float = 1.0,
    min_separation: float = 2.0,
) -> PeakSet:
    """Local maxima of ``log10 S`` standing out by ``min_prominence`` decades.

    Peaks closer than ``min_separation`` are thinned, keeping the higher one.
    Half-widths are measured on the linear spectrum at half prominence.
    """
    s = np.asarray(spectrum.values, dtype=float)
    if len(s) < 3 or not np.any(s > 0):
        return PeakSet()
    floor = s.max() * 1e-16
    logs = np.log10(np.maximum(s, floor))
    dw = spectrum.spacing
    distance = max(1, int(math.ceil(min_separation / dw - 1e-9)))
    idx, props = find_peaks(logs, prominence=min_prominence, distance=distance)
    if len(idx) == 0:
        return PeakSet()
    widths = peak_widths(s, idx, rel_height=0.5)[0]
    peaks = tuple(
        Peak(float(spectrum.omega[i]), float(s[i]), float(wd * dw / 2), float(pr))
        for i, wd, pr in zip(idx, widths, props["prominences"])
    )
    return PeakSet(peaks)
