import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dressedfluor.dressed import (
    assign_peaks,
    collective_basis_lab,
    coupling_blocks,
    dressed_levels,
    level_diagram,
    manifold_report,
    symmetry_group,
    transition_table,
)
from dressedfluor.dynamics import DriveParameters, build_hamiltonian_lab, build_hamiltonian_rotating
from dressedfluor.errors import ValidationError
from dressedfluor.geometry import MAGIC_COS_THETA, EmitterLayout, build_couplings
from dressedfluor.spectrum import Peak, PeakSet, field_operator


def rotating(layout, rabi=200.0, det=0.0):
    return build_hamiltonian_rotating(layout, build_couplings(layout), DriveParameters(rabi, det))


def equilateral():
    return EmitterLayout.pairwise(0.01 * (1 - np.eye(3)), MAGIC_COS_THETA)


def isosceles():
    kr = np.array([[0, 0.01 * np.sqrt(2), 0.01], [0.01 * np.sqrt(2), 0, 0.01], [0.01, 0.01, 0]])
    return EmitterLayout.pairwise(kr, MAGIC_COS_THETA)


def test_single_emitter_dressed_states():
    lay = EmitterLayout.pairwise([[0.0]], MAGIC_COS_THETA)
    lv = dressed_levels(rotating(lay))
    np.testing.assert_allclose(lv.energies, [-100.0, 100.0], atol=1e-12)
    table = transition_table(lv, field_operator(lay))
    np.testing.assert_allclose(np.abs(table.amplitude), 0.5, atol=1e-12)
    np.testing.assert_allclose(table.delta, [[0, -200], [200, 0]], atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(0, 1), st.floats(0.1, 300), st.floats(-50, 50))
def test_levels_diagonalize_hamiltonian(kr, ct, rabi, det):
    lay = EmitterLayout.pairwise([[0, kr], [kr, 0]], ct)
    h = rotating(lay, rabi, det)
    lv = dressed_levels(h)
    v = lv.vectors
    np.testing.assert_allclose(v.conj().T @ v, np.eye(4), atol=1e-10)
    np.testing.assert_allclose(v @ np.diag(lv.energies) @ v.conj().T, h, atol=1e-9 * max(1, np.abs(h).max()))
    assert np.all(np.diff(lv.energies) >= 0)
    lead = v[np.argmax(np.abs(v), axis=0), np.arange(4)]
    np.testing.assert_allclose(lead.imag, 0, atol=1e-12)
    assert np.all(lead.real > 0)
    table = transition_table(lv, field_operator(lay))
    np.testing.assert_allclose(table.delta, -table.delta.T)
    np.testing.assert_allclose(table.amplitude, v.conj().T @ field_operator(lay).operator @ v)


def test_non_hermitian_rejected():
    with pytest.raises(ValidationError):
        dressed_levels(np.array([[0, 1], [0, 0]]))


def test_equilateral_degeneracies_follow_from_symmetry():
    h = rotating(equilateral())
    assert len(symmetry_group(h, 3)) == 6
    lv = dressed_levels(h)
    # two-dimensional irreps of the triangle group pair up levels 2,3 and 5,6
    groups = lv.degenerate_groups(1e-8 * 200)
    assert [2, 3] in groups and [5, 6] in groups
    assert sum(len(g) for g in groups) == 8 and len(groups) == 6


def test_equilateral_blocks():
    lay = equilateral()
    lv = dressed_levels(rotating(lay))
    table = transition_table(lv, field_operator(lay))
    blocks = coupling_blocks(table)
    assert blocks.as_sets() == [{0, 1, 4, 7}, {2, 3, 5, 6}]
    assert blocks.block_of(5) == 1
    cross = np.abs(table.amplitude)[np.ix_([0, 1, 4, 7], [2, 3, 5, 6])]
    assert cross.max() < 1e-8 * np.abs(table.amplitude).max()


def test_isosceles_symmetry_and_blocks():
    lay = isosceles()
    h = rotating(lay)
    assert symmetry_group(h, 3) == [(0, 1, 2), (1, 0, 2)]
    lv = dressed_levels(h)
    assert len(lv.degenerate_groups(1e-6)) == 8
    blocks = coupling_blocks(transition_table(lv, field_operator(lay)))
    assert blocks.as_sets() == [{0, 1, 3, 4, 6, 7}, {2, 5}]


def test_blocks_follow_exchange_parity():
    # exchange-odd dressed states never connect to exchange-even ones
    lay = isosceles()
    lv = dressed_levels(rotating(lay))
    from dressedfluor.qops import permutation_operator

    p = permutation_operator((1, 0, 2), 3)
    parity = np.real(np.einsum("ij,ik,kj->j", lv.vectors.conj(), p, lv.vectors))
    np.testing.assert_allclose(np.abs(parity), 1, atol=1e-9)
    odd = set(np.flatnonzero(parity < 0))
    assert odd == {2, 5}


def test_assign_peaks_synthetic():
    lay = EmitterLayout.pairwise([[0.0]], MAGIC_COS_THETA)
    table = transition_table(dressed_levels(rotating(lay)), field_operator(lay))
    peaks = PeakSet((Peak(-200.3, 1, 1, 1), Peak(0.0, 1, 1, 1), Peak(57.0, 1, 1, 1)))
    a = assign_peaks(peaks, table, tolerance=1.0)
    assert a.matches[0].pairs == ((0, 1),)
    assert a.matches[1].is_central
    assert a.unmatched == [57.0]
    assert not a.all_matched
    # the default window ends at the last peak, so +200 is not reported ...
    assert a.unrealized == ()
    # ... until the window covers it
    assert assign_peaks(peaks, table, window=(-300, 300)).unrealized == ((1, 0),)
    assert a.as_dict()["unmatched"] == [57.0]


def test_amplitude_floor_controls_allowed_set():
    lay = equilateral()
    table = transition_table(dressed_levels(rotating(lay)), field_operator(lay))
    assert table.allowed(np.inf).sum() == 0
    assert table.allowed(0.0).all()
    assert table.floor() == pytest.approx(1e-6 * np.abs(table.amplitude).max())


def test_isosceles_single_unrealized_transition(preset_results):
    _, res = preset_results["isosceles_fig2"]
    assert res.assignment.all_matched
    assert set(res.assignment.unrealized) == {(4, 6), (6, 4)}


def test_collective_basis_two_atoms():
    lay = EmitterLayout.pairwise([[0, 0.01], [0.01, 0]], MAGIC_COS_THETA)
    c = build_couplings(lay)
    states = collective_basis_lab(build_hamiltonian_lab(c, 1000.0), 2)
    assert [s.excitation for s in states] == [0, 1, 1, 2]
    w12 = c.omega[0, 1]  # negative at kr = 0.01
    single = {s.symmetry: s for s in states if s.excitation == 1}
    assert single["symmetric"].energy == pytest.approx(1000.0 + w12)
    assert single["antisymmetric"].energy == pytest.approx(1000.0 - w12)
    comps = single["antisymmetric"].components(2)
    assert set(comps) == {"↓↑", "↑↓"}
    assert abs(comps["↓↑"]) == pytest.approx(2**-0.5)
    assert comps["↓↑"] == pytest.approx(-comps["↑↓"])
    assert states[0].symmetry == states[3].symmetry == "symmetric"


def test_collective_basis_three_atoms_equilateral():
    c = build_couplings(equilateral())
    states = collective_basis_lab(build_hamiltonian_lab(c, 1000.0), 3)
    one = [s for s in states if s.excitation == 1]
    w = c.omega[0, 1]
    # symmetric W state at w_a + 2 W, two degenerate states at w_a - W
    np.testing.assert_allclose(sorted(s.energy for s in one), sorted([1000 + 2 * w, 1000 - w, 1000 - w]), atol=1e-9)
    assert sum(s.symmetry == "symmetric" for s in one) == 1
    assert {s.swap_parity for s in one if s.symmetry == "mixed"} == {1, -1}
    rep = manifold_report(states, DriveParameters(200.0))
    assert rep.dimension == 8
    assert [e.photon_label for e in rep.entries[:2]] == ["|n>", "|n-1>"]


def test_collective_basis_rejects_drive():
    lay = EmitterLayout.pairwise([[0, 0.01], [0.01, 0]], MAGIC_COS_THETA)
    with pytest.raises(ValidationError):
        collective_basis_lab(rotating(lay), 2)


def test_level_diagram_lists_allowed_transitions():
    lay = equilateral()
    lv = dressed_levels(rotating(lay))
    table = transition_table(lv, field_operator(lay))
    blocks = coupling_blocks(table)
    diag = level_diagram(lv, table, blocks)
    assert len(diag["transitions"]) == int(table.allowed(blocks.threshold).sum())
    for t in diag["transitions"]:
        assert t["frequency"] == pytest.approx(lv.energies[t["lower"]] - lv.energies[t["upper"]])
        assert blocks.block_of(t["upper"]) == t["block"]


def test_single_emitter_single_block():
    lay = EmitterLayout.pairwise([[0.0]], MAGIC_COS_THETA)
    table = transition_table(dressed_levels(rotating(lay)), field_operator(lay))
    assert coupling_blocks(table).as_sets() == [{0, 1}]


def test_non_interacting_limit():
    lay = EmitterLayout.pairwise(1e6 * (1 - np.eye(3)), 0.0)
    lv = dressed_levels(rotating(lay, rabi=200.0))
    ref = sorted(a + b + c for a in (-100, 100) for b in (-100, 100) for c in (-100, 100))
    np.testing.assert_allclose(lv.energies, ref, atol=1e-3)


def test_degenerate_projectors_are_reproducible():
    h = rotating(equilateral())
    a, b = dressed_levels(h), dressed_levels(h.copy())
    for grp in a.degenerate_groups(1e-6):
        np.testing.assert_allclose(a.projector(grp), b.projector(grp), atol=1e-9)
    from dressedfluor.qops import permutation_operator

    p = permutation_operator((1, 2, 0), 3)
    np.testing.assert_allclose(dressed_levels(p @ h @ p.T).energies, a.energies, atol=1e-10)


def test_reference_collective_states():
    from dressedfluor.qops import basis_index

    eq = collective_basis_lab(build_hamiltonian_lab(build_couplings(equilateral()), 1000.0), 3)
    (w,) = [s for s in eq if s.excitation == 1 and s.symmetry == "symmetric"]
    ref = np.zeros(8)
    ref[[basis_index("↑↓↓"), basis_index("↓↑↓"), basis_index("↓↓↑")]] = 3**-0.5
    np.testing.assert_allclose(w.vector, ref, atol=1e-12)
    assert abs(eq[0].vector[0]) == 1 and abs(eq[-1].vector[7]) == 1
    iso = collective_basis_lab(build_hamiltonian_lab(build_couplings(isosceles()), 1000.0), 3)
    ref = np.zeros(8)
    ref[basis_index("↓↑↓")], ref[basis_index("↓↓↑")] = 2**-0.5, -(2**-0.5)
    odd = [s for s in iso if s.swap_parity == -1]
    assert len(odd) == 2  # one per singly and doubly excited sector
    single = [s for s in odd if s.excitation == 1][0]
    assert abs(abs(single.vector.conj() @ ref) - 1) < 1e-12


def test_manifold_offsets():
    states = collective_basis_lab(build_hamiltonian_lab(build_couplings(equilateral()), 1000.0), 3)
    rep = manifold_report(states, DriveParameters(200.0))
    assert all(e.photon_offset == e.excitation for e in rep.entries)
    assert rep.entries[0].photon_label == "|n>"
    assert rep.entries[-1].photon_label == "|n-3>"
    assert rep.manifold_spacing == "omega_L"


def test_isosceles_near_degenerate_transitions_share_peaks(preset_results):
    _, res = preset_results["isosceles_fig2"]
    shared = [m for m in res.assignment.matches if not m.is_central and len(m.pairs) > 1]
    # three sidebands per side each carry two distinct transitions closer than the line width
    assert len(shared) == 6
    for m in shared:
        d = [res.system.table.delta[p] for p in m.pairs]
        assert max(d) - min(d) < 0.5
