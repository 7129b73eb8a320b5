from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from smbundle.breaking import BrokenPotentials, build_vacuum_frame
from smbundle.bundles import LEPTON_DOUBLET, Chirality, project, standard_forms
from smbundle.connections import (
    GaugePotentials,
    compose_gauge,
    physical_constants,
    su2_gauge_transform,
    vacuum_connections,
)
from smbundle.generators import (
    smooth_complex,
    smooth_covector,
    smooth_hermitian_traceless,
    smooth_scalar,
    smooth_spinor,
    smooth_su2_gauge,
)
from smbundle.higgs import HiggsParams, vacuum_higgs
from smbundle.manifold import build_chart, integrate
from smbundle.matter import (
    LEPTON_GROUPS,
    QUARK_GROUPS,
    Background,
    BosonFields,
    LeptonConfig,
    QuarkConfig,
    boson_masses,
    check_quark_couplings,
    constrained_g1,
    coupling_constraint,
    extract_lepton_masses,
    extract_quark_masses,
    higgs_sector_expand,
    kinetic_action,
    lepton_charges,
    lepton_masses,
    lepton_sector_actions,
    quark_charges,
    quark_masses,
    quark_sector_actions,
    quark_yukawa_hermitian,
    reconstruct_doublet,
    rotate_doublet,
    split_doublet,
)

from conftest import grid_tol

PARAMS = HiggsParams.vacuum_consistent(mu=1.0, v=1.0, m_phi=0.5)
G2 = 0.9
G1 = constrained_g1(G2)
H1 = np.array([[0.1, 0.02 + 0.03j, 0], [0.02 - 0.03j, 0.2, 0.01j], [0, -0.01j, 0.3]])
H2 = np.diag([0.15, 0.25, 0.35]).astype(complex)


def _background(chart_name="minkowski-coordinate", vacuum="imaginary-constant", constants="natural", extents=9, u1_D=1.0):
    chart = build_chart(chart_name, extents=extents, spacing=0.1)
    forms = replace(standard_forms(), u1_D=u1_D)
    phi_vac = u1_D**-1.5 * vacuum_higgs(chart, vacuum, PARAMS.v)
    frame = build_vacuum_frame(phi_vac, forms, tol=1e-10)
    return Background(chart, vacuum_connections(chart, vacuum), frame, forms, physical_constants(constants), G1, G2)


@pytest.fixture(scope="module")
def bg():
    return _background()


def _bosons(bg, rng, amplitude=0.1):
    chart = bg.chart
    Wp = smooth_complex(chart, rng, (4,), amplitude)
    return BosonFields(
        smooth_covector(chart, rng, amplitude),
        smooth_covector(chart, rng, amplitude),
        Wp,
        bg.forms.u1_D**6 * Wp.conj(),
        smooth_scalar(chart, rng, amplitude),
    )


def _leptons(chart, rng, h=(0.1, 0.2, 0.3)):
    return LeptonConfig(
        np.stack([smooth_spinor(chart, rng) for _ in range(3)]),
        np.stack([smooth_spinor(chart, rng, chirality="chiral") for _ in range(3)]),
        np.asarray(h),
    )


def _quarks(chart, rng, h1=H1, h2=H2, mode="hermitian"):
    return QuarkConfig(
        np.stack([smooth_spinor(chart, rng, (3,)) for _ in range(3)]),
        np.stack([smooth_spinor(chart, rng, (3,)) for _ in range(3)]),
        h1, h2, mode,
    )


# --- couplings, charges, masses ------------------------------------------------------


def test_coupling_constraint_value():
    assert coupling_constraint(1.0, 1.0) == pytest.approx(6 / np.sqrt(10) - 1, rel=1e-14)
    assert coupling_constraint(1.0, 1.0) == pytest.approx(0.8974, abs=1e-4)


@pytest.mark.parametrize("g2", [0.6, 1.0, 2.5])
def test_constrained_g1_matches_root_finder(g2):
    oracle = brentq(lambda g1: coupling_constraint(g1, g2), 1e-6, 10.0, xtol=1e-15)
    assert constrained_g1(g2) == pytest.approx(oracle, rel=1e-12)
    assert abs(coupling_constraint(constrained_g1(g2), g2)) <= 1e-14


def test_constrained_g1_domain():
    with pytest.raises(ValueError, match="1/2"):
        constrained_g1(0.5)


def test_mass_ratio_for_unit_g2():
    m = boson_masses(constrained_g1(1.0), 1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    assert m["m_W"] / m["m_Z"] == pytest.approx(np.sqrt(3) / 2, abs=1e-12)


def test_boson_mass_closed_form_cgs():
    k = physical_constants("cgs-nist")
    g1, g2, v, m_chi = 0.3, 0.8, 2.0, 1.5
    m = boson_masses(g1, g2, v, m_chi, k.e, k.hbar, k.c)
    unit = k.e * v * k.hbar / k.c**2
    assert m["m_Z"] == pytest.approx(np.sqrt(4 * np.pi * (g2**2 + 9 * g1**2) / m_chi) * unit, rel=1e-14)
    assert m["m_W"] == pytest.approx(np.sqrt(4 * np.pi * g2**2 / m_chi) * unit, rel=1e-14)
    with pytest.raises(ValueError, match="m_chi"):
        boson_masses(g1, g2, v, 0.0, k.e, k.hbar, k.c)


@given(st.floats(0.01, 5), st.floats(0.01, 5))
def test_w_never_heavier_than_z(g1, g2):
    m = boson_masses(g1, g2, 1.0, 1.0, 1.0, 1.0, 1.0)
    assert m["m_W"] <= m["m_Z"]


@given(st.floats(0.51, 10))
def test_charges_under_constraint(g2):
    e = 4.80420440e-10
    g1 = constrained_g1(g2)
    lq, qq = lepton_charges(g1, g2, e), quark_charges(e, g1, g2)
    assert lq["Q_charged"] == pytest.approx(-e, rel=1e-12)
    assert qq["Q_up"] == pytest.approx(2 * e / 3, rel=1e-12)
    assert qq["Q_down"] == pytest.approx(-e / 3, rel=1e-12)
    assert qq["Q_up"] - qq["Q_down"] == pytest.approx(e, rel=1e-12)
    assert lq["Q_neutrino"] == 0


def test_default_quark_charges():
    assert quark_charges(3.0) == {"Q_up": 2.0, "Q_down": -1.0}


def test_lepton_masses_closed_form():
    m = lepton_masses([0.1, 0.2, 0.3], 2.0, 1.0)
    assert m["m_e"] == pytest.approx(0.1 * 2 / np.sqrt(2))
    with pytest.raises(ValueError):
        lepton_masses([0.1, 0.2], 1.0, 1.0)


def test_quark_masses_examples():
    m = quark_masses(H1, H2, 1.0, 2.0, "hermitian")
    assert m["m_u"] == pytest.approx(0.1 / (2 * np.sqrt(2)))
    assert m["m_t"] == pytest.approx(0.3 / (2 * np.sqrt(2)))
    assert m["m_s"] == pytest.approx(0.25 / (2 * np.sqrt(2)))


def test_quark_masses_undefined_in_general_mode(bg, rng):
    with pytest.raises(ValueError, match="undefined"):
        quark_masses(H1, H2, 1.0, 1.0, "general")
    with pytest.raises(ValueError, match="undefined"):
        extract_quark_masses(H1, H2, 1.0, "general", bg, rng)


def test_coupling_mode_validation():
    with pytest.raises(ValueError, match="Hermitian"):
        check_quark_couplings(H1 + 0.1j * np.eye(3), H2, "hermitian")
    with pytest.raises(ValueError, match="non-real"):
        check_quark_couplings(H1 + 0.1j * np.eye(3), H2, "diagonal-real")
    with pytest.raises(ValueError, match="unknown"):
        check_quark_couplings(H1, H2, "weird")
    check_quark_couplings(H1 + 0.1j * np.eye(3), H2, "general")


@pytest.mark.parametrize("constants", ["natural", "cgs-nist"])
def test_mass_extraction(constants, rng):
    bg = _background(constants=constants, extents=5)
    c = bg.constants.c
    closed = lepton_masses([0.1, 0.2, 0.3], PARAMS.v, c)
    for m, m_x in zip(closed.values(), extract_lepton_masses([0.1, 0.2, 0.3], PARAMS.v, bg, rng)):
        assert m_x == pytest.approx(m, rel=1e-10)
    closed_q = quark_masses(H1, H2, PARAMS.v, c, "hermitian")
    extracted = extract_quark_masses(H1, H2, PARAMS.v, "hermitian", bg, rng)
    for name, m in closed_q.items():
        assert extracted[name] == pytest.approx(m, rel=1e-10), name


# --- Higgs sector ---------------------------------------------------------------------


def test_higgs_sector_two_path(bg, rng):
    hs = higgs_sector_expand(_bosons(bg, rng), PARAMS, bg)
    closed = hs.L41 + hs.L42 + hs.L43 + hs.L44 + hs.L45
    assert abs(hs.L4_direct - closed) <= grid_tol(bg.chart) * abs(closed)
    assert hs.split_residual <= grid_tol(bg.chart) * abs(hs.split_sum)
    assert hs.kinetic_residual <= grid_tol(bg.chart)


def test_higgs_sector_requires_consistent_params(bg):
    with pytest.raises(ValueError, match="lambda"):
        higgs_sector_expand(BosonFields.zero(bg.chart), HiggsParams(2.0, 1.0, 1.0, 0.5, 1.0), bg)
    with pytest.raises(ValueError, match="m_chi"):
        higgs_sector_expand(BosonFields.zero(bg.chart), HiggsParams(1.0, 1.0, 1.0, 0.5, 2.0), bg)


def test_constant_z_mass_term(bg):
    bosons = BosonFields.zero(bg.chart)
    Z = np.zeros(bg.chart.extents + (4,))
    Z[..., 0] = 1.0
    hs = higgs_sector_expand(replace(bosons, Z=Z), PARAMS, bg)
    vol = integrate(np.ones(bg.chart.extents), bg.chart)
    assert hs.L42 == pytest.approx(hs.m_Z**2 / (8 * np.pi) * vol, rel=1e-12)
    assert hs.L43 == 0 and hs.L44 == 0


def test_vacuum_constant_term(bg):
    hs = higgs_sector_expand(BosonFields.zero(bg.chart), PARAMS, bg)
    vol = integrate(np.ones(bg.chart.extents), bg.chart)
    expected = PARAMS.m_chi * PARAMS.mu**2 * PARAMS.v**2 / 16 * vol
    assert hs.L53 == pytest.approx(expected, rel=1e-12)
    assert hs.L5_direct == pytest.approx(expected, rel=1e-12)
    assert hs.L41 == hs.L42 == hs.L51 == hs.L52 == 0


@pytest.mark.xfail(strict=True, reason="published constant term is m_chi c v^2 / 4 per volume; the potential gives m_chi c mu^2 v^2 / 16")
def test_vacuum_constant_term_published_value(bg):
    hs = higgs_sector_expand(BosonFields.zero(bg.chart), PARAMS, bg)
    vol = integrate(np.ones(bg.chart.extents), bg.chart)
    assert hs.L53 == pytest.approx(PARAMS.m_chi * PARAMS.v**2 / 4 * vol, rel=1e-6)


# --- fermion sectors ------------------------------------------------------------------


def test_doublet_round_trip(bg, rng):
    lower = smooth_spinor(bg.chart, rng, (3,), chirality="chiral")
    upper = smooth_spinor(bg.chart, rng, (3,), chirality="chiral")
    doublet = reconstruct_doublet(lower, upper, bg.frame)
    assert doublet.shape == bg.chart.extents + (4, 2, 3)
    lo, up = split_doublet(doublet, bg.frame, bg.forms)
    np.testing.assert_allclose(lo, lower, atol=1e-14)
    np.testing.assert_allclose(up, upper, atol=1e-14)


@pytest.mark.parametrize("vacuum", ["trivial-flat", "imaginary-constant"])
@pytest.mark.parametrize("chart_name", ["minkowski-coordinate", "rotating-frame"])
def test_lepton_two_path(chart_name, vacuum, rng):
    bg = _background(chart_name, vacuum)
    actions = lepton_sector_actions(_leptons(bg.chart, rng), _bosons(bg, rng), PARAMS, bg)
    for group, parts in LEPTON_GROUPS.items():
        split = sum(actions.terms[p] for p in parts)
        assert abs(actions.direct[group] - split) <= grid_tol(bg.chart) * abs(split), group


@pytest.mark.parametrize("vacuum", ["trivial-flat", "imaginary-constant"])
def test_quark_two_path(vacuum, rng):
    bg = _background(vacuum=vacuum)
    gluon = smooth_hermitian_traceless(bg.chart, rng, 3)
    actions = quark_sector_actions(_quarks(bg.chart, rng), _bosons(bg, rng), PARAMS, bg, gluon)
    for group, parts in QUARK_GROUPS.items():
        split = sum(actions.terms[p] for p in parts)
        assert abs(actions.direct[group] - split) <= grid_tol(bg.chart) * abs(split), group


def test_two_path_with_nontrivial_u1_form(rng):
    bg = _background(u1_D=1.3, extents=7)
    bosons = _bosons(bg, rng)
    la = lepton_sector_actions(_leptons(bg.chart, rng), bosons, PARAMS, bg)
    qa = quark_sector_actions(_quarks(bg.chart, rng), bosons, PARAMS, bg)
    for actions, groups in ((la, LEPTON_GROUPS), (qa, QUARK_GROUPS)):
        for group, parts in groups.items():
            split = sum(actions.terms[p] for p in parts)
            assert abs(actions.direct[group] - split) <= grid_tol(bg.chart) * abs(split), group


def test_zero_fields_give_zero_actions(bg):
    zeros = np.zeros((3,) + bg.chart.extents + (4,), complex)
    actions = lepton_sector_actions(LeptonConfig(zeros, zeros, np.ones(3)), BosonFields.zero(bg.chart), PARAMS, bg)
    assert all(v == 0 for v in actions.terms.values())
    assert all(v == 0 for v in actions.direct.values())


def test_gluon_does_not_touch_electroweak_currents(bg, rng):
    quarks = _quarks(bg.chart, rng)
    gluon = smooth_hermitian_traceless(bg.chart, rng, 3)
    actions = quark_sector_actions(quarks, BosonFields.zero(bg.chart), PARAMS, bg, gluon)
    assert actions.terms["L83"] == actions.terms["L84"] == actions.terms["L85"] == 0
    bare = quark_sector_actions(quarks, BosonFields.zero(bg.chart), PARAMS, bg)
    assert abs(actions.terms["L81"] - bare.terms["L81"]) > 1e-6


def test_neutrino_must_be_chiral(bg, rng):
    psi = np.stack([smooth_spinor(bg.chart, rng) for _ in range(3)])
    with pytest.raises(ValueError, match="chiral"):
        LeptonConfig(psi, psi, np.ones(3))


def test_fermion_actions_need_orthonormal_frame(rng):
    chart = build_chart("curved-demo", extents=5, frame=lambda x: np.broadcast_to(np.eye(4), x.shape[1:] + (4, 4)))
    base = _background(extents=5)
    frame = build_vacuum_frame(vacuum_higgs(chart, "trivial-flat", PARAMS.v), base.forms)
    bg = replace(base, chart=chart, vacuum=vacuum_connections(chart), frame=frame)
    with pytest.raises(ValueError, match="orthonormal"):
        lepton_sector_actions(_leptons(bg.chart, rng), BosonFields.zero(bg.chart), PARAMS, bg)


def test_reprojecting_chiral_neutrinos_changes_nothing(bg, rng):
    leptons = _leptons(bg.chart, rng)
    bosons = _bosons(bg, rng)
    base = lepton_sector_actions(leptons, bosons, PARAMS, bg)
    shifted = replace(leptons, neutrino=project(leptons.neutrino, Chirality.CHIRAL, dirac_axis=-1))
    again = lepton_sector_actions(shifted, bosons, PARAMS, bg)
    for key in base.terms:
        assert again.terms[key] == pytest.approx(base.terms[key], rel=1e-13, abs=1e-300), key


def test_hermitian_yukawa_form(bg, rng):
    quarks = _quarks(bg.chart, rng)
    chi = smooth_scalar(bg.chart, rng)
    bosons = replace(BosonFields.zero(bg.chart), chi=chi)
    general = quark_sector_actions(quarks, bosons, PARAMS, bg)
    herm = quark_yukawa_hermitian(quarks, chi, PARAMS.v, bg)
    for key in ("L91", "L92"):
        assert herm[key] == pytest.approx(general.terms[key], rel=1e-12)


def test_non_hermitian_couplings_differ_from_hermitian_form(bg, rng):
    h1 = H1 + np.triu(np.full((3, 3), 0.05), 1)
    quarks = _quarks(bg.chart, rng, h1=h1, mode="general")
    general = quark_sector_actions(quarks, BosonFields.zero(bg.chart), PARAMS, bg)
    herm = quark_yukawa_hermitian(quarks, np.zeros(bg.chart.extents), PARAMS.v, bg)
    assert abs(herm["L91"] - general.terms["L91"]) > 1e-8


def test_yukawa_is_linear_in_couplings(bg, rng):
    quarks = _quarks(bg.chart, rng)
    doubled = replace(quarks, h1=2 * quarks.h1, h2=2 * quarks.h2)
    zero = BosonFields.zero(bg.chart)
    a = quark_sector_actions(quarks, zero, PARAMS, bg).terms["L91"]
    b = quark_sector_actions(doubled, zero, PARAMS, bg).terms["L91"]
    assert b == pytest.approx(2 * a, rel=1e-13)


def test_doublet_kinetic_action_gauge_invariant(bg, rng):
    chart = bg.chart
    pots = GaugePotentials(smooth_covector(chart, rng), smooth_hermitian_traceless(chart, rng, 2), smooth_hermitian_traceless(chart, rng, 3))
    conn = compose_gauge(bg.vacuum, pots)
    omega = smooth_su2_gauge(chart, rng)
    _, su2_t = su2_gauge_transform(omega, bg.frame.phi_vac, conn.su2, chart, bg.forms)
    doublet = reconstruct_doublet(smooth_spinor(chart, rng, chirality="chiral"), smooth_spinor(chart, rng, chirality="chiral"), bg.frame)
    rotated = rotate_doublet(omega, doublet)
    before = kinetic_action(doublet, LEPTON_DOUBLET, conn, bg)
    after = kinetic_action(rotated, LEPTON_DOUBLET, replace(conn, su2=su2_t), bg)
    assert abs(before - after) <= grid_tol(chart) * abs(before)


def test_broken_bosons_view(bg, rng):
    bosons = _bosons(bg, rng)
    bp = bosons.broken(G1, G2)
    assert isinstance(bp, BrokenPotentials) and bp.s == pytest.approx(bg.s)
