import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smbundle.bundles import standard_forms
from smbundle.breaking import (
    BrokenPotentials,
    az_inverse,
    az_rotation,
    boson_field_strengths,
    boson_lagrangian,
    boson_lagrangian_relative_residual,
    build_vacuum_frame,
    expand_field_strength_check,
    expand_su2_tensor,
    mixing_norm,
    recompose_su2,
    solve_vacuum_preserving,
    vacuum_preserving_residual,
)
from smbundle.generators import smooth_complex, smooth_covector, smooth_hermitian_traceless
from smbundle.higgs import vacuum_higgs

from conftest import CHARTS, VACUA, grid_tol


def _frame(z, forms=None):
    return build_vacuum_frame(np.asarray(z, complex), forms or standard_forms())


def _bosons(chart, rng, forms, amplitude=0.1):
    Wp = smooth_complex(chart, rng, (4,), amplitude)
    return smooth_covector(chart, rng, amplitude), smooth_covector(chart, rng, amplitude), Wp, forms.u1_D**6 * Wp.conj()


def test_projectors_of_standard_vacuum():
    fr = _frame([1 / np.sqrt(2), 0])
    np.testing.assert_allclose(fr.P, np.diag([1, 0]))
    np.testing.assert_allclose(fr.Q, np.diag([0, 1]))
    np.testing.assert_allclose(fr.phi_dual, [0, 1 / np.sqrt(2)])
    np.testing.assert_allclose(fr.Wfp, [[0, 0], [1, 0]])
    np.testing.assert_allclose(fr.Wpf, [[0, 1], [0, 0]])
    assert fr.v == pytest.approx(1.0)


def test_zero_vacuum_rejected(forms):
    with pytest.raises(ValueError, match="vanishes"):
        build_vacuum_frame(np.zeros(2), forms)


finite = st.floats(-3, 3)


@settings(max_examples=100)
@given(st.tuples(finite, finite, finite, finite).filter(lambda t: np.linalg.norm(t) > 1e-2))
def test_frame_identities_random_vacua(t):
    forms = standard_forms()
    fr = _frame([t[0] + 1j * t[1], t[2] + 1j * t[3]], forms)
    for name, r in fr.identity_residuals().items():
        assert r <= 1e-12, name
    for name, r in fr.invariant_residuals(forms).items():
        assert r <= 1e-12 * max(1.0, fr.v**2), name


def test_grid_frame_identities(charts, forms):
    chart = charts["curved-demo"]
    fr = build_vacuum_frame(vacuum_higgs(chart, "imaginary-constant", 1.0), forms, tol=1e-10)
    for name, r in fr.identity_residuals().items():
        assert r <= 1e-12, name


def test_expansion_reconstructs_potential(flat, forms, rng):
    fr = build_vacuum_frame(vacuum_higgs(flat, "imaginary-constant", 1.0), forms, tol=1e-10)
    exp = expand_su2_tensor(smooth_hermitian_traceless(flat, rng, 2), fr)
    for name, r in exp.residuals.items():
        assert r <= 1e-12, name


def test_expansion_of_third_pauli_matrix():
    fr = _frame([1 / np.sqrt(2), 0])
    exp = expand_su2_tensor(np.diag([1.0, -1.0])[None], fr)
    assert exp.A_plus[0] == pytest.approx(1.0) and exp.A_minus[0] == pytest.approx(-1.0)
    assert exp.A3[0] == pytest.approx(-1.0)
    assert exp.Wplus[0] == 0 and exp.Wminus[0] == 0


def test_vacuum_preserving_example():
    fr = _frame([1 / np.sqrt(2), 0])
    sol = solve_vacuum_preserving(fr, 1.0, 1.0, np.array([[0.5, 0, 0, 0]]))
    assert sol.A_plus[0, 0] == pytest.approx(-1.5)
    assert sol.A_minus[0, 0] == pytest.approx(1.5)
    assert abs(sol.Wplus).max() <= 1e-12 and sol.residual <= 1e-12


def test_vacuum_preserving_random(rng, forms):
    fr = _frame(rng.normal(size=2) + 1j * rng.normal(size=2), forms)
    uCA = rng.normal(size=(4,))
    g1, g2 = 0.4, 0.9
    sol = solve_vacuum_preserving(fr, g1, g2, uCA)
    CA = (sol.A_plus[:, None, None] * fr.P + sol.A_minus[:, None, None] * fr.Q
          + sol.Wplus[:, None, None] * fr.Wfp + sol.Wminus[:, None, None] * fr.Wpf)
    assert vacuum_preserving_residual(CA, uCA, fr, g1, g2) <= 1e-12
    # oracle: CA phi = -3 (g1 / g2) uCA phi
    np.testing.assert_allclose(CA @ fr.phi_vac, -3 * g1 / g2 * uCA[:, None] * fr.phi_vac, atol=1e-12)


def test_vacuum_preserving_needs_g2():
    with pytest.raises(ValueError):
        solve_vacuum_preserving(_frame([1, 0]), 1.0, 0.0, np.zeros(4))


def test_az_rotation_example():
    Z, A = az_rotation(np.array(1.0), np.array(0.0), 1.0, 1.0)
    assert Z == pytest.approx(-1 / np.sqrt(10)) and A == pytest.approx(3 / np.sqrt(10))
    assert mixing_norm(1.0, 1.0) == pytest.approx(np.sqrt(10))
    with pytest.raises(ValueError):
        mixing_norm(0.0, 0.0)


@given(finite, finite, st.floats(0.05, 2), st.floats(0.05, 2))
def test_az_round_trip(a3, u, g1, g2):
    Z, A = az_rotation(np.array(a3), np.array(u), g1, g2)
    back = az_inverse(A, Z, g1, g2)
    assert back[0] == pytest.approx(a3, abs=1e-12) and back[1] == pytest.approx(u, abs=1e-12)


def test_broken_potentials_round_trip(flat, forms, rng):
    fr = build_vacuum_frame(vacuum_higgs(flat, "trivial-flat", 1.0), forms)
    A, Z, Wp, Wm = _bosons(flat, rng, forms)
    bp = BrokenPotentials(A, Z, Wp, Wm, 0.4, 0.9)
    back, exp = BrokenPotentials.from_su2(bp.su2(fr), bp.uCA, fr, 0.4, 0.9)
    for got, want in ((back.A, A), (back.Z, Z), (back.Wplus, Wp), (back.Wminus, Wm)):
        np.testing.assert_allclose(got, want, atol=1e-12)
    assert bp.conjugation_residual() == 0
    np.testing.assert_allclose(recompose_su2(A, Z, Wp, Wm, fr, 0.4, 0.9), bp.su2(fr))


@pytest.mark.parametrize("chart_name", CHARTS)
@pytest.mark.parametrize("vacuum", VACUA)
def test_field_strength_two_path(charts, vacua, forms, natural, rng, chart_name, vacuum):
    chart = charts[chart_name]
    fr = build_vacuum_frame(vacuum_higgs(chart, vacuum, 1.0), forms, tol=1e-10)
    bp = BrokenPotentials(*_bosons(chart, rng, forms), 0.4, 0.9)
    for name, r in expand_field_strength_check(bp, fr, vacua[(chart_name, vacuum)], chart, natural).items():
        assert r <= grid_tol(chart), name


@pytest.mark.parametrize("chart_name", CHARTS)
def test_boson_terms_sum_to_kinetic_actions(charts, vacua, forms, natural, rng, chart_name):
    chart = charts[chart_name]
    fr = build_vacuum_frame(vacuum_higgs(chart, "imaginary-constant", 1.0), forms, tol=1e-10)
    bp = BrokenPotentials(*_bosons(chart, rng, forms, 0.3), 0.4, 0.9)
    terms = boson_lagrangian(bp, fr, vacua[(chart_name, "imaginary-constant")], chart, natural)
    assert boson_lagrangian_relative_residual(terms) <= grid_tol(chart)


def test_collinear_w_has_no_quartic_term(flat, vacua, forms, natural, rng):
    fr = build_vacuum_frame(vacuum_higgs(flat, "trivial-flat", 1.0), forms)
    A, Z, _, _ = _bosons(flat, rng, forms)
    direction = smooth_covector(flat, rng)
    phase = np.exp(0.7j)
    bp = BrokenPotentials(A, Z, phase * direction, np.conj(phase) * direction, 0.4, 0.9)
    terms = boson_lagrangian(bp, fr, vacua[("minkowski-coordinate", "trivial-flat")], flat, natural)
    assert abs(terms["L22"]) <= 1e-15


def test_dressed_w_strengths_are_conjugate(flat, vacua, forms, natural, rng):
    bp = BrokenPotentials(*_bosons(flat, rng, forms), 0.4, 0.9)
    fs = boson_field_strengths(bp, vacua[("minkowski-coordinate", "imaginary-constant")], flat, natural)
    np.testing.assert_allclose(fs["Wcal_minus"], np.conj(fs["Wcal_plus"]), atol=1e-14)


def test_pure_photon_configuration(flat, vacua, forms, natural):
    fr = build_vacuum_frame(vacuum_higgs(flat, "trivial-flat", 1.0), forms)
    zero = np.zeros(flat.extents + (4,))
    A = zero.copy()
    A[..., 0] = flat.coords[1]
    bp = BrokenPotentials(A, zero, zero.astype(complex), zero.astype(complex), 0.4, 0.9)
    terms = boson_lagrangian(bp, fr, vacua[("minkowski-coordinate", "trivial-flat")], flat, natural)
    assert terms["L11"] != 0
    for name, value in terms.items():
        if name not in ("L11", "L1+L2"):
            assert value == 0, name
    assert terms["L11"] == pytest.approx(terms["L1+L2"], rel=1e-12)
