"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line."""
import time

import numpy as np
import pytest

from dressedfluor.config import load_preset
from dressedfluor.dressed import coupling_blocks, dressed_levels, transition_table
from dressedfluor.dynamics import (
    DriveParameters,
    build_hamiltonian_rotating,
    build_liouvillian,
    propagate,
    steady_state,
)
from dressedfluor.geometry import MAGIC_COS_THETA, EmitterLayout, build_couplings, coupling_gamma, coupling_omega
from dressedfluor.pipeline import compute_spectrum
from dressedfluor.qops import vec
from dressedfluor.spectrum import field_operator, g1_correlation, spectrum_eigen, tau_grid

from conftest import random_density_matrix
from test_spectrum import bloch_spectrum


@pytest.fixture
def report(capsys):
    def _report(name, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {name}: {detail}")
        assert ok, detail

    return _report


def timed(name):
    cfg = load_preset(name)
    t0 = time.perf_counter()
    res = compute_spectrum(cfg.layout, cfg.drive, cfg.spectrum, cfg.peaks)
    return cfg, res, time.perf_counter() - t0


def test_criterion1_mollow(report):
    cfg, res, elapsed = timed("mollow")
    peaks = res.peaks
    ok = len(peaks) == 3
    centers = peaks.centers
    if ok:
        ok &= bool(np.all(np.abs(centers - [-200.0, 0.0, 200.0]) <= 0.5))
        left, mid, right = peaks
        ok &= abs(mid.half_width - 0.5) <= 0.05
        ok &= all(abs(p.half_width - 0.75) <= 0.075 for p in (left, right))
        exact, _ = bloch_spectrum(200.0, 0.0, centers)
        want = 0.5 * (exact[0] + exact[2]) / exact[1]
        got = 0.5 * (left.height + right.height) / mid.height
        ok &= abs(got / want - 1) <= 0.10
        detail = (
            f"centers {np.round(centers, 3).tolist()}, half-widths "
            f"{[round(p.half_width, 3) for p in peaks]}, sideband:center {got:.4f} "
            f"(analytic {want:.4f}), {elapsed:.2f} s"
        )
    else:
        detail = f"{len(peaks)} peaks at {centers.tolist()}"
    ok &= elapsed < 30
    report("criterion 1 Mollow oracle", ok, detail)


def test_criterion2_equilateral(report):
    cfg, res, elapsed = timed("equilateral_fig1")
    peaks, a = res.peaks, res.assignment
    side = peaks.sidebands(cfg.peaks.tolerance)
    c = np.array([p.center for p in side])
    dw = res.spectrum.spacing
    symmetric = len(c) > 0 and bool(np.all(np.min(np.abs(c[:, None] + c[None, :]), axis=1) <= dw))
    inset = peaks.in_window(-230, -180)
    ok = (
        len(side) == 14
        and peaks.central(cfg.peaks.tolerance) is not None
        and symmetric
        and a.all_matched
        and len(inset) >= 2
        and elapsed < 300
    )
    report(
        "criterion 2 equilateral",
        ok,
        f"{len(side)} sidebands + central, symmetric={symmetric}, unmatched={a.unmatched}, "
        f"{len(inset)} peaks in [-230, -180], {elapsed:.2f} s",
    )


def test_criterion3_isosceles(report):
    cfg, res, elapsed = timed("isosceles_fig2")
    peaks, a = res.peaks, res.assignment
    side = peaks.sidebands(cfg.peaks.tolerance)
    blocks = res.system.blocks.as_sets()
    ok = (
        len(side) == 24
        and peaks.central(cfg.peaks.tolerance) is not None
        and a.all_matched
        and sorted(blocks, key=min) == [{0, 1, 3, 4, 6, 7}, {2, 5}]
        and elapsed < 300
    )
    report(
        "criterion 3 isosceles (peaks, assignment, blocks)",
        ok,
        f"{len(side)} sidebands + central, unmatched={a.unmatched}, blocks={blocks}, {elapsed:.2f} s",
    )


def test_criterion3_delta46_at_central_peak(report, preset_results):
    cfg, res = preset_results["isosceles_fig2"]
    e = res.system.levels.energies
    d46 = e[4] - e[6]
    central = res.peaks.central(cfg.peaks.tolerance)
    ok = central is not None and abs(d46 - central.center) <= cfg.peaks.tolerance
    report(
        "criterion 3 Delta_46 at the central peak",
        ok,
        f"Delta_46 = {d46:.4f}, central peak at {central.center if central else None}, "
        f"tolerance {cfg.peaks.tolerance}; unrealized allowed transitions {list(res.assignment.unrealized)}",
    )


def test_criterion4_equilateral_degeneracies(report):
    cfg = load_preset("equilateral_fig1")
    c = build_couplings(cfg.layout)
    lv = dressed_levels(build_hamiltonian_rotating(cfg.layout, c, cfg.drive))
    e = lv.energies
    rabi = cfg.drive.rabi
    table = transition_table(lv, field_operator(cfg.layout))
    blocks = coupling_blocks(table).as_sets()
    m = np.abs(table.amplitude)
    cross = max(m[np.ix_([0, 1, 4, 7], [2, 3, 5, 6])].max(), m[np.ix_([2, 3, 5, 6], [0, 1, 4, 7])].max())
    ok = (
        abs(e[2] - e[3]) < 1e-8 * rabi
        and abs(e[5] - e[6]) < 1e-8 * rabi
        and blocks == [{0, 1, 4, 7}, {2, 3, 5, 6}]
        and cross < 1e-8 * m.max()
    )
    report(
        "criterion 4 degeneracy structure",
        ok,
        f"|E2-E3| = {abs(e[2] - e[3]):.2e}, |E5-E6| = {abs(e[5] - e[6]):.2e}, blocks {blocks}, "
        f"cross-block |M| / max = {cross / m.max():.2e}",
    )


@pytest.mark.parametrize("name", ["mollow", "equilateral_fig1", "isosceles_fig2", "two_atom_magic"])
def test_criterion5_cross_method(report, preset_results, name):
    _, res = preset_results[name]
    s = res.system
    four = res.spectrum
    eig = spectrum_eigen(s.liouvillian, s.steady, s.field, four.omega)
    mask = np.abs(four.omega) > 1
    err = np.linalg.norm((four.values - eig.values)[mask]) / np.linalg.norm(eig.values[mask])
    report(f"criterion 5 cross-method [{name}]", err < 1e-3, f"relative L2 error {err:.2e}")


def random_configuration(rng):
    n = int(rng.integers(1, 4))
    while True:
        pos = rng.uniform(-1.5, 1.5, size=(n, 3))
        if n == 1 or min(np.linalg.norm(pos[i] - pos[j]) for i in range(n) for j in range(i)) > 0.1:
            break
    dip = rng.normal(size=3)
    kdir = rng.normal(size=3)
    layout = EmitterLayout.geometric(pos, dip / np.linalg.norm(dip))
    drive = DriveParameters(float(rng.uniform(0.5, 50.0)), float(rng.uniform(-10, 10)), tuple(kdir / np.linalg.norm(kdir)))
    return layout, drive


def test_criterion6_invariants(report):
    rng = np.random.default_rng(20240601)
    worst = dict(trace=0.0, residual=0.0, positivity=0.0, hermiticity=0.0, gamma_psd=0.0, g1_zero=0.0)
    failures = []
    for k in range(100):
        layout, drive = random_configuration(rng)
        c = build_couplings(layout)
        liou = build_liouvillian(layout, c, drive)
        d = liou.hilbert_dim
        try:
            ss = steady_state(liou)
        except Exception as exc:  # recorded, reported below
            failures.append(f"#{k}: {exc}")
            continue
        rho_t = propagate(liou, random_density_matrix(d, rng), float(rng.uniform(0.01, 3.0)))
        g1 = g1_correlation(liou, ss, field_operator(layout), tau_grid(1e-3, 2e-3))
        worst["trace"] = max(worst["trace"], np.abs(vec(np.eye(d)) @ liou.matrix).max())
        worst["residual"] = max(worst["residual"], ss.residual)
        worst["positivity"] = max(worst["positivity"], -np.linalg.eigvalsh(ss.rho).min())
        worst["hermiticity"] = max(worst["hermiticity"], np.abs(rho_t - rho_t.conj().T).max())
        worst["gamma_psd"] = max(worst["gamma_psd"], -np.linalg.eigvalsh(c.gamma).min())
        worst["g1_zero"] = max(worst["g1_zero"], abs(g1.values[0] - 1))
    ok = (
        not failures
        and worst["trace"] < 1e-10
        and worst["residual"] < 1e-9
        and worst["positivity"] <= 1e-9
        and worst["hermiticity"] < 1e-10
        and worst["gamma_psd"] <= 1e-12
        and worst["g1_zero"] < 1e-9
    )
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report("criterion 6 invariant suite (100 configs)", ok, detail + (f"; failures {failures}" if failures else ""))


def test_criterion7_kernel_analytics(report):
    cos_vals = np.linspace(-1, 1, 20)
    lim = np.abs(coupling_gamma(1e-6, cos_vals) - 1).max()
    kr = np.logspace(-3, 1, 400)
    g_err = np.abs(coupling_gamma(kr, MAGIC_COS_THETA) - np.sin(kr) / kr).max()
    o_err = np.abs(coupling_omega(kr, MAGIC_COS_THETA) + np.cos(kr) / (2 * kr)).max()
    ok = lim < 1e-6 and g_err < 1e-12 and o_err < 1e-12
    report(
        "criterion 7 kernel analytics",
        ok,
        f"|gamma(1e-6) - 1| = {lim:.1e}, magic gamma err {g_err:.1e}, magic omega err {o_err:.1e}",
    )


def test_criterion8_two_atom_new_sidebands(report, preset_results):
    cfg2, two = preset_results["two_atom_magic"]
    cfg1, one = preset_results["mollow"]
    tol = cfg2.peaks.tolerance
    s2 = [p.center for p in two.peaks.sidebands(tol)]
    s1 = np.array([p.center for p in one.peaks.sidebands(tol)])
    new = [c for c in s2 if np.min(np.abs(s1 - c)) > tol]
    ok = len(new) > 0
    report(
        "criterion 8 two-atom sidebands",
        ok,
        f"N=2 sidebands {np.round(s2, 2).tolist()}, absent from Mollow {np.round(new, 2).tolist()}",
    )
