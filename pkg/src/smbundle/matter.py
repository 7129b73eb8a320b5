"""Higgs-sector expansion, boson and fermion masses, charges, and the lepton and quark actions."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .breaking import BrokenPotentials, VacuumFrame, mixing_norm
from .bundles import (
    CHARGED_LEPTON,
    DOWN_QUARK,
    DOWN_SINGLET,
    LEPTON_DOUBLET,
    LEPTON_SINGLET,
    NEUTRINO,
    QUARK_DOUBLET,
    UP_QUARK,
    UP_SINGLET,
    BundleKind,
    FiberForms,
    SpeciesDescriptor,
    gamma_algebra,
)
from .connections import ConnectionSet, PhysicalConstants, compose_gauge, covariant_derivative
from .higgs import HiggsParams, higgs_actions, higgs_kinetic2, perturb_vacuum, potential_polynomial
from .manifold import DIM, ETA, Chart, integrate, lie_derivatives

DIRAC, SU2, SU3 = BundleKind.DIRAC, BundleKind.SU2, BundleKind.SU3


def _max(x: np.ndarray) -> float:
    return float(np.abs(x).max(initial=0.0))


@dataclass(frozen=True, eq=False)
class Background:
    """Everything the sector actions share: geometry, vacuum, forms, units and couplings."""

    chart: Chart
    vacuum: ConnectionSet
    frame: VacuumFrame
    forms: FiberForms
    constants: PhysicalConstants
    g1: float
    g2: float
    g3: float = 1.0

    @property
    def kappa(self) -> float:
        """e / (hbar c)."""
        return self.constants.e / (self.constants.hbar * self.constants.c)

    @property
    def s(self) -> float:
        return mixing_norm(self.g1, self.g2)

    def u1_power(self, weight: int) -> float:
        return self.forms.u1_D**weight


@dataclass(frozen=True, eq=False)
class BosonFields:
    """Photon, Z and W covector fields [..., k] and the real scalar Higgs perturbation chi."""

    A: np.ndarray
    Z: np.ndarray
    Wplus: np.ndarray
    Wminus: np.ndarray
    chi: np.ndarray

    @classmethod
    def zero(cls, chart: Chart) -> "BosonFields":
        g = chart.extents
        return cls(np.zeros(g + (DIM,)), np.zeros(g + (DIM,)), np.zeros(g + (DIM,), complex), np.zeros(g + (DIM,), complex), np.zeros(g))

    def broken(self, g1: float, g2: float) -> BrokenPotentials:
        return BrokenPotentials(self.A, self.Z, self.Wplus, self.Wminus, g1, g2)


def composed_connections(bosons: BosonFields, bg: Background, gluon: np.ndarray | None = None) -> ConnectionSet:
    """Vacuum connections plus the boson potentials (and optional gluon potential)."""
    bp = bosons.broken(bg.g1, bg.g2)
    pots = bp.gauge_potentials(bg.frame, bg.constants, su3=gluon, g3=bg.g3)
    return compose_gauge(bg.vacuum, pots)


# --- masses, charges, couplings -------------------------------------------------


def coupling_constraint(g1: float, g2: float) -> float:
    """6 g1 g2 / sqrt(g2^2 + 9 g1^2) - 1; zero when the charged-lepton charge is -e."""
    return 6 * g1 * g2 / mixing_norm(g1, g2) - 1


def constrained_g1(g2: float) -> float:
    """The positive g1 solving the charge constraint for a given g2 (requires g2 > 1/2)."""
    if g2 <= 0.5:
        raise ValueError("the charge constraint has a positive solution only for g2 > 1/2")
    return g2 / np.sqrt(36 * g2**2 - 9)


def boson_masses(g1: float, g2: float, v: float, m_chi: float, e: float, hbar: float, c: float) -> dict[str, float]:
    for name, val in (("g2", g2), ("v", v), ("m_chi", m_chi), ("e", e), ("hbar", hbar), ("c", c)):
        if val <= 0:
            raise ValueError(f"{name} must be positive, got {val}")
    if g1 < 0:
        raise ValueError(f"g1 must be nonnegative, got {g1}")
    unit = e * v * hbar / c**2
    return {
        "m_Z": float(np.sqrt(4 * np.pi * (g2**2 + 9 * g1**2) / m_chi) * unit),
        "m_W": float(np.sqrt(4 * np.pi * g2**2 / m_chi) * unit),
    }


def lepton_charges(g1: float, g2: float, e: float) -> dict[str, float]:
    return {"Q_charged": -6 * e * g1 * g2 / mixing_norm(g1, g2), "Q_neutrino": 0.0}


def quark_charges(e: float, g1: float | None = None, g2: float | None = None) -> dict[str, float]:
    """Up and down charges; with couplings given, the general forms 4 e g1 g2 / s and -2 e g1 g2 / s."""
    if g1 is None or g2 is None:
        return {"Q_up": 2 * e / 3, "Q_down": -e / 3}
    s = mixing_norm(g1, g2)
    return {"Q_up": 4 * e * g1 * g2 / s, "Q_down": -2 * e * g1 * g2 / s}


LEPTON_NAMES = ("m_e", "m_mu", "m_tau")
UP_NAMES = ("m_u", "m_c", "m_t")
DOWN_NAMES = ("m_d", "m_s", "m_b")


def _mass(h: float, v: float, c: float) -> float:
    return float(h * v / (np.sqrt(2) * c))


def lepton_masses(h, v: float, c: float) -> dict[str, float]:
    if v <= 0 or c <= 0:
        raise ValueError("v and c must be positive")
    h = np.asarray(h, dtype=float)
    if h.shape != (3,):
        raise ValueError("expected three lepton couplings")
    return {name: _mass(hi, v, c) for name, hi in zip(LEPTON_NAMES, h)}


QUARK_MODES = ("diagonal-real", "hermitian", "general")


def check_quark_couplings(h1: np.ndarray, h2: np.ndarray, mode: str, tol: float = 1e-12) -> None:
    if mode not in QUARK_MODES:
        raise ValueError(f"unknown coupling mode {mode!r}; expected one of {QUARK_MODES}")
    for name, h in (("h1", h1), ("h2", h2)):
        if h.shape != (3, 3):
            raise ValueError(f"{name} must be 3x3")
        if mode == "diagonal-real" and _max(np.diag(h).imag) > tol:
            raise ValueError(f"{name} has non-real diagonal entries")
        if mode == "hermitian" and _max(h - h.conj().T) > tol:
            raise ValueError(f"{name} is not Hermitian")


def quark_masses(h1, h2, v: float, c: float, mode: str = "diagonal-real") -> dict[str, float]:
    """Individual quark masses; defined only when the diagonal couplings are real."""
    h1, h2 = np.asarray(h1, dtype=complex), np.asarray(h2, dtype=complex)
    check_quark_couplings(h1, h2, mode)
    if mode == "general":
        raise ValueError(
            "individual quark masses are undefined for general couplings; "
            "use mode 'diagonal-real' or 'hermitian'"
        )
    out = {name: _mass(h.real, v, c) for name, h in zip(UP_NAMES, np.diag(h1))}
    out.update({name: _mass(h.real, v, c) for name, h in zip(DOWN_NAMES, np.diag(h2))})
    return out


# --- Higgs sector ---------------------------------------------------------------


@dataclass(frozen=True)
class HiggsSectorTerms:
    L41: float
    L42: float
    L43: float
    L44: float
    L45: float
    L51: float
    L52: float
    L53: float
    m_Z: float
    m_W: float
    L4_direct: float
    L5_direct: float
    kinetic_residual: float

    @property
    def split_sum(self) -> float:
        return self.L41 + self.L42 + self.L43 + self.L44 + self.L45 + self.L51 + self.L52 + self.L53

    @property
    def split_residual(self) -> float:
        return abs(self.L4_direct + self.L5_direct - self.split_sum)


def _dot(g_inv: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...i,...j->...", g_inv, a, b)


def higgs_kinetic_closed_form(bosons: BosonFields, v: float, bg: Background) -> np.ndarray:
    """|nabla phi|^2 of the perturbed vacuum written through chi, Z and W."""
    g_inv = bg.chart.inverse_metric
    grad_chi = lie_derivatives(bosons.chi, bg.chart)
    half_rho2 = (v + bosons.chi) ** 2 / 2
    k2 = bg.kappa**2
    return (
        k2 * bg.s**2 * half_rho2 * _dot(g_inv, bosons.Z, bosons.Z)
        + 0.5 * _dot(g_inv, grad_chi, grad_chi)
        + k2 * bg.g2**2 * half_rho2 * _dot(g_inv, bosons.Wplus, bosons.Wminus).real
    )


def higgs_sector_expand(bosons: BosonFields, params: HiggsParams, bg: Background, tol: float = 1e-10) -> HiggsSectorTerms:
    """Split L4 + L5 of the perturbed vacuum into mass, interaction and constant terms.

    Requires lambda = mu^2 / v^2 (so the linear chi term vanishes) and
    m_chi = 2 m_phi.
    """
    c4, c3, c2, c1, c0 = potential_polynomial(params)
    if abs(c1) > tol * max(1.0, params.mu**2 * params.v):
        raise ValueError("Higgs parameters are not vacuum-consistent: lambda must equal mu^2 / v^2")
    if abs(params.m_chi - 2 * params.m_phi) > tol * params.m_chi:
        raise ValueError("m_chi must equal 2 m_phi")
    chart, K = bg.chart, bg.constants
    hbar, c, v, m_chi = K.hbar, K.c, params.v, params.m_chi
    masses = boson_masses(bg.g1, bg.g2, v, m_chi, K.e, hbar, c)
    mZ2, mW2 = masses["m_Z"] ** 2, masses["m_W"] ** 2
    g_inv = chart.inverse_metric
    chi = bosons.chi
    grad_chi = lie_derivatives(chi, chart)
    ZZ = _dot(g_inv, bosons.Z, bosons.Z)
    WW = _dot(g_inv, bosons.Wplus, bosons.Wminus).real
    I = lambda f: float(np.real(integrate(f, chart)))  # noqa: E731
    pot = -m_chi * c / 4

    phi = perturb_vacuum(bg.frame.phi_vac, chi, v, bg.forms)
    conn = composed_connections(bosons, bg)
    direct = higgs_actions(phi, params, conn, bg.forms, chart, K)
    closed = higgs_kinetic_closed_form(bosons, v, bg)
    kin_res = _max((higgs_kinetic2(phi, conn, bg.forms, chart) - closed)[chart.interior()])
    return HiggsSectorTerms(
        L41=hbar**2 / (2 * m_chi * c) * I(_dot(g_inv, grad_chi, grad_chi)),
        L42=c * mZ2 / (8 * np.pi * hbar**2) * I(ZZ),
        L43=c * mW2 / (8 * np.pi * hbar**2) * I(WW),
        L44=c * mZ2 / (4 * np.pi * hbar**2 * v) * I(chi * ZZ) + c * mZ2 / (8 * np.pi * hbar**2 * v**2) * I(chi**2 * ZZ),
        L45=c * mW2 / (4 * np.pi * hbar**2 * v) * I(chi * WW) + c * mW2 / (8 * np.pi * hbar**2 * v**2) * I(chi**2 * WW),
        L51=pot * c2 * I(chi**2),
        L52=pot * (c3 * I(chi**3) + c4 * I(chi**4)),
        L53=pot * c0 * I(np.ones(chart.extents)),
        m_Z=masses["m_Z"],
        m_W=masses["m_W"],
        L4_direct=float(np.real(direct["L4"])),
        L5_direct=float(np.real(direct["L5"])),
        kinetic_residual=kin_res,
    )


# --- fermion bilinears ------------------------------------------------------------

_LETTERS = {DIRAC: ("a", "b"), SU2: ("e", "f"), SU3: ("c", "d")}


def _fiber_forms(forms: FiberForms) -> dict[BundleKind, np.ndarray]:
    return {DIRAC: forms.dirac_D, SU2: forms.su2_D, SU3: forms.su3_D}


def hermitian_density(
    x: np.ndarray,
    y: np.ndarray,
    slots: tuple[BundleKind, ...],
    forms: FiberForms,
    gamma: np.ndarray | None = None,
    contract_q: bool = False,
) -> np.ndarray:
    """Sum over all fiber indices of the basic forms times conj(x) times (gamma y).

    Without ``gamma`` this is the pointwise sesquilinear pairing <x, y>.  With
    ``gamma`` [q, a, b] the Dirac slot of y is hit by gamma^q first; the
    result carries a trailing q axis unless ``contract_q`` (y then has a
    frame axis q before its fiber axes, which is summed against gamma^q).
    """
    mats = _fiber_forms(forms)
    y_sub = "".join(_LETTERS[k][0] for k in slots)
    x_sub = "".join(_LETTERS[k][1] for k in slots)
    ops = [mats[k] for k in slots]
    subs = [_LETTERS[k][0] + _LETTERS[k][1] for k in slots]
    out = "..."
    if gamma is None:
        ops.append(y)
        subs.append("..." + y_sub)
    else:
        ops.append(gamma)
        subs.append("qag")
        ops.append(y)
        subs.append("..." + ("q" if contract_q else "") + y_sub.replace("a", "g"))
        out += "" if contract_q else "q"
    ops.append(np.conj(x))
    subs.append("..." + x_sub)
    return np.einsum(",".join(subs) + "->" + out, *ops, optimize=True)


def _on_dirac(M: np.ndarray, psi: np.ndarray, axis: int = DIM) -> np.ndarray:
    """Apply a 4x4 matrix to the Dirac axis of psi."""
    return np.moveaxis(np.moveaxis(psi, axis, -1) @ M.T, -1, axis)


def _require_orthonormal(chart: Chart, tol: float = 1e-10) -> None:
    dev = _max(chart.frame_metric - ETA)
    if dev > tol:
        raise ValueError(
            f"fermion actions use constant gamma matrices and need an orthonormal frame (frame metric deviates by {dev:.3g})"
        )


def _unit_higgs(frame: VacuumFrame) -> tuple[np.ndarray, np.ndarray]:
    """phi / |phi| and dual / |dual| of the vacuum (the norms coincide)."""
    norm = frame.v / np.sqrt(2)
    return frame.phi_vac / norm, frame.phi_dual / norm


def _su2_view(vec: np.ndarray, ndim: int) -> np.ndarray:
    """Reshape a doublet-valued grid field [..., 2] to broadcast against [..., 4, 2, *extra]."""
    return vec.reshape(vec.shape[:DIM] + (1, 2) + (1,) * (ndim - DIM - 2))


def reconstruct_doublet(lower: np.ndarray, upper: np.ndarray, frame: VacuumFrame) -> np.ndarray:
    """Chiral pieces [..., 4, *extra] to the doublet lower (x) phi_hat + upper (x) dual_hat [..., 4, 2, *extra]."""
    phi_hat, dual_hat = _unit_higgs(frame)
    lo, up = np.expand_dims(lower, DIM + 1), np.expand_dims(upper, DIM + 1)
    return lo * _su2_view(phi_hat, lo.ndim) + up * _su2_view(dual_hat, up.ndim)


def rotate_doublet(omega: np.ndarray, doublet: np.ndarray) -> np.ndarray:
    """Apply an SU(2) gauge field [..., 2, 2] to the SU(2) slot of a doublet [..., 4, 2, *extra]."""
    om = omega.reshape(omega.shape[:DIM] + (1, 2, 2) + (1,) * (doublet.ndim - DIM - 2))
    return np.sum(om * np.expand_dims(doublet, DIM + 1), axis=DIM + 2)


def split_doublet(doublet: np.ndarray, frame: VacuumFrame, forms: FiberForms) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of ``reconstruct_doublet`` by D-pairing the SU(2) slot against phi_hat and dual_hat."""
    D = forms.su2_D

    def component(basis: np.ndarray) -> np.ndarray:
        coeff = np.einsum("ab,...b->...a", D, basis.conj())
        norm = np.einsum("...a,...a->...", basis, coeff)
        proj = np.sum(doublet * _su2_view(coeff, doublet.ndim), axis=DIM + 1)
        return proj / norm.reshape(norm.shape + (1,) * (proj.ndim - DIM))

    phi_hat, dual_hat = _unit_higgs(frame)
    return component(phi_hat), component(dual_hat)


@dataclass(frozen=True, eq=False)
class SectorActions:
    """Split terms, the same actions evaluated directly, and per-generation mass terms."""

    terms: dict[str, complex]
    direct: dict[str, complex]
    mass_terms: dict[str, list[complex]] = field(default_factory=dict)

    def residuals(self, groups: dict[str, tuple[str, ...]]) -> dict[str, float]:
        return {name: float(abs(self.direct[name] - sum(self.terms[t] for t in parts))) for name, parts in groups.items()}


def _kinetic(psi, dpsi, slots, forms, alg) -> np.ndarray:
    return hermitian_density(psi, dpsi, slots, forms, alg.gamma, contract_q=True)


def kinetic_action(psi: np.ndarray, species: SpeciesDescriptor, connections: ConnectionSet, bg: Background) -> complex:
    """i hbar Dbar^w integral <psi, gamma^q nabla_q psi>, w the species hypercharge weight."""
    dpsi = covariant_derivative(psi, species, connections, bg.chart)
    density = _kinetic(psi, dpsi, species.slots, bg.forms, gamma_algebra())
    return 1j * bg.constants.hbar * bg.u1_power(species.weight) * complex(integrate(density, bg.chart))


def _current_dot(vec: np.ndarray, x, y, slots, forms, alg) -> np.ndarray:
    """sum_q vec_q <x, gamma^q y>."""
    return np.einsum("...q,...q->...", vec, hermitian_density(x, y, slots, forms, alg.gamma))


@dataclass(frozen=True, eq=False)
class LeptonConfig:
    """Per generation (leading axis): charged wave function [..., 4], chiral neutrino [..., 4], coupling h."""

    charged: np.ndarray
    neutrino: np.ndarray
    h: np.ndarray

    def __post_init__(self) -> None:
        if self.charged.shape != self.neutrino.shape or self.charged.shape[0] != len(self.h):
            raise ValueError("charged, neutrino and h must agree in generation count and shape")
        alg = gamma_algebra()
        bad = _max(_on_dirac(alg.Hcirc, self.neutrino, self.neutrino.ndim - 1))
        if bad > 1e-12 * max(1.0, _max(self.neutrino)):
            raise ValueError(f"neutrino fields must be chiral (antichiral part {bad:.3g})")


LEPTON_GROUPS = {"L6": ("L61", "L62", "L63", "L64", "L65"), "L7": ("L71", "L72")}


def lepton_sector_actions(config: LeptonConfig, bosons: BosonFields, params: HiggsParams, bg: Background) -> SectorActions:
    """Split lepton kinetic and Yukawa actions, with the direct doublet evaluation alongside."""
    chart, forms, K = bg.chart, bg.forms, bg.constants
    _require_orthonormal(chart)
    alg = gamma_algebra()
    hbar, c, e = K.hbar, K.c, K.e
    s, g1, g2 = bg.s, bg.g1, bg.g2
    I = lambda f: complex(integrate(f, chart))  # noqa: E731
    w6 = bg.u1_power(-6)
    phi = perturb_vacuum(bg.frame.phi_vac, bosons.chi, params.v, forms)
    full = composed_connections(bosons, bg)
    Q = lepton_charges(g1, g2, e)["Q_charged"]
    M_charged = ((9 * g1**2 - g2**2) * alg.Hdot + 18 * g1**2 * alg.Hcirc) / s
    A, Z, Wp, Wm, chi = bosons.A, bosons.Z, bosons.Wplus, bosons.Wminus, bosons.chi
    D_, S_ = (DIRAC,), (DIRAC, SU2)

    names = ("L61", "L62", "L63", "L64", "L65", "L71", "L72")
    terms = dict.fromkeys(names, 0j)
    direct = {"L6": 0j, "L7": 0j}
    mass_terms: dict[str, list[complex]] = {"L71": [], "norm": []}
    for psi, nu, h in zip(config.charged, config.neutrino, config.h):
        chiral, anti = _on_dirac(alg.Hdot, psi), _on_dirac(alg.Hcirc, psi)
        # direct evaluation on the reconstructed doublet
        doublet = reconstruct_doublet(chiral, nu, bg.frame)
        direct["L6"] += kinetic_action(doublet, LEPTON_DOUBLET, full, bg) + kinetic_action(anti, LEPTON_SINGLET, full, bg)
        anti_phi = anti[..., :, None] * phi[..., None, :]
        direct["L7"] -= h * bg.u1_power(-3) * (
            I(hermitian_density(anti_phi, doublet, S_, forms)) + I(hermitian_density(doublet, anti_phi, S_, forms))
        )
        # split form
        d_psi = covariant_derivative(psi, CHARGED_LEPTON, bg.vacuum, chart)
        d_psi = d_psi - 1j * Q / (hbar * c) * A[..., :, None] * psi[..., None, :]
        d_nu = covariant_derivative(nu, NEUTRINO, bg.vacuum, chart)
        terms["L61"] += 1j * hbar * w6 * I(_kinetic(psi, d_psi, D_, forms, alg))
        terms["L62"] += 1j * hbar * I(_kinetic(nu, d_nu, D_, forms, alg))
        terms["L63"] += -e / c * w6 * I(_current_dot(Z, psi, _on_dirac(M_charged, psi), D_, forms, alg))
        terms["L64"] += -e / c * s * I(_current_dot(Z, nu, _on_dirac(alg.Hdot, nu), D_, forms, alg))
        terms["L65"] += e / c * g2 * (w6 * I(_current_dot(Wm, psi, nu, D_, forms, alg)) + I(_current_dot(Wp, nu, psi, D_, forms, alg)))
        pair = hermitian_density(psi, psi, D_, forms)
        mass = -h * params.v / np.sqrt(2) * w6 * I(pair)
        terms["L71"] += mass
        terms["L72"] += -h / np.sqrt(2) * w6 * I(chi * pair)
        mass_terms["L71"].append(mass)
        mass_terms["norm"].append(w6 * I(pair))
    return SectorActions(terms, direct, mass_terms)


@dataclass(frozen=True, eq=False)
class QuarkConfig:
    """Per generation (leading axis): up-type and down-type wave functions [..., 4, 3]; couplings h1, h2."""

    up: np.ndarray
    down: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    mode: str = "general"

    def __post_init__(self) -> None:
        if self.up.shape != self.down.shape or self.up.shape[0] != 3:
            raise ValueError("up and down fields must have matching shapes with three generations")
        check_quark_couplings(np.asarray(self.h1, complex), np.asarray(self.h2, complex), self.mode)


QUARK_GROUPS = {"L8": ("L81", "L82", "L83", "L84", "L85"), "L9": ("L91", "L92")}


def _yukawa_split(left, right, h, weight, forms, alg, chart, scalar) -> complex:
    """sum_ij integral of Dbar^w scalar [h_ij <l_i, Hdot r_j> + conj(h_ji) <l_i, Hcirc r_j>]."""
    total = 0j
    slots = (DIRAC, SU3)
    for i in range(3):
        for j in range(3):
            chiral = hermitian_density(left[i], _on_dirac(alg.Hdot, right[j]), slots, forms)
            anti = hermitian_density(left[i], _on_dirac(alg.Hcirc, right[j]), slots, forms)
            total += complex(integrate(scalar * (h[i, j] * chiral + np.conj(h[j, i]) * anti), chart))
    return weight * total


def quark_yukawa_hermitian(config: QuarkConfig, chi: np.ndarray, v: float, bg: Background) -> dict[str, complex]:
    """L91 and L92 for Hermitian coupling matrices, where both chiral parts share h_ij."""
    chart, forms = bg.chart, bg.forms
    slots = (DIRAC, SU3)
    out = {"L91": 0j, "L92": 0j}
    for h, fields_, w in ((config.h1, config.up, bg.u1_power(4)), (config.h2, config.down, bg.u1_power(-2))):
        for i in range(3):
            for j in range(3):
                pair = hermitian_density(fields_[i], fields_[j], slots, forms)
                out["L91"] -= h[i, j] * v / np.sqrt(2) * w * complex(integrate(pair, chart))
                out["L92"] -= h[i, j] / np.sqrt(2) * w * complex(integrate(chi * pair, chart))
    return out


def quark_sector_actions(
    config: QuarkConfig, bosons: BosonFields, params: HiggsParams, bg: Background, gluon: np.ndarray | None = None
) -> SectorActions:
    """Split quark kinetic and Yukawa actions, with the direct doublet evaluation alongside.

    ``gluon`` is the SU(3) potential [..., k, 3, 3]; colour stays unbroken so
    it enters only through the kinetic terms.
    """
    chart, forms, K = bg.chart, bg.forms, bg.constants
    _require_orthonormal(chart)
    alg = gamma_algebra()
    hbar, c, e = K.hbar, K.c, K.e
    s, g1, g2 = bg.s, bg.g1, bg.g2
    h1, h2 = np.asarray(config.h1, complex), np.asarray(config.h2, complex)
    I = lambda f: complex(integrate(f, chart))  # noqa: E731
    scale = (1 + bosons.chi / params.v)
    phi, dual = scale[..., None] * bg.frame.phi_vac, scale[..., None] * bg.frame.phi_dual
    full = composed_connections(bosons, bg, gluon)
    # vacuum electroweak connections with the gluon potential switched on
    colour = replace(bg.vacuum, su3=full.su3)
    charges = quark_charges(e, g1, g2)
    M_up = (-12 * g1**2 * alg.Hcirc - (3 * g1**2 - g2**2) * alg.Hdot) / s
    M_down = (6 * g1**2 * alg.Hcirc - (3 * g1**2 + g2**2) * alg.Hdot) / s
    A, Z, Wp, Wm, chi = bosons.A, bosons.Z, bosons.Wplus, bosons.Wminus, bosons.chi
    C_, DSC = (DIRAC, SU3), (DIRAC, SU2, SU3)
    w_up, w_down, w_dbl = bg.u1_power(4), bg.u1_power(-2), bg.u1_power(1)

    names = ("L81", "L82", "L83", "L84", "L85")
    terms = dict.fromkeys(names, 0j)
    direct = {"L8": 0j, "L9": 0j}
    doublets = []
    for up, down in zip(config.up, config.down):
        up_c, up_a = _on_dirac(alg.Hdot, up), _on_dirac(alg.Hcirc, up)
        dn_c, dn_a = _on_dirac(alg.Hdot, down), _on_dirac(alg.Hcirc, down)
        doublet = reconstruct_doublet(dn_c, up_c, bg.frame)
        doublets.append(doublet)
        direct["L8"] += (
            kinetic_action(doublet, QUARK_DOUBLET, full, bg)
            + kinetic_action(up_a, UP_SINGLET, full, bg)
            + kinetic_action(dn_a, DOWN_SINGLET, full, bg)
        )
        d_up = covariant_derivative(up, UP_QUARK, colour, chart)
        d_up = d_up - 1j * charges["Q_up"] / (hbar * c) * A[..., :, None, None] * up[..., None, :, :]
        d_dn = covariant_derivative(down, DOWN_QUARK, colour, chart)
        d_dn = d_dn - 1j * charges["Q_down"] / (hbar * c) * A[..., :, None, None] * down[..., None, :, :]
        terms["L81"] += 1j * hbar * w_down * I(_kinetic(down, d_dn, C_, forms, alg))
        terms["L82"] += 1j * hbar * w_up * I(_kinetic(up, d_up, C_, forms, alg))
        terms["L83"] += -e / c * w_down * I(_current_dot(Z, down, _on_dirac(M_down, down), C_, forms, alg))
        terms["L84"] += -e / c * w_up * I(_current_dot(Z, up, _on_dirac(M_up, up), C_, forms, alg))
        terms["L85"] += e / c * g2 * (
            w_down * I(_current_dot(Wm, down, _on_dirac(alg.Hdot, up), C_, forms, alg))
            + w_up * I(_current_dot(Wp, up, _on_dirac(alg.Hdot, down), C_, forms, alg))
        )

    # direct Yukawa terms on the doublets
    ups_a = [_on_dirac(alg.Hcirc, u) for u in config.up]
    dns_a = [_on_dirac(alg.Hcirc, d) for d in config.down]
    for i in range(3):
        for j in range(3):
            up_dual = ups_a[i][..., :, None, :] * dual[..., None, :, None]
            dn_phi = dns_a[i][..., :, None, :] * phi[..., None, :, None]
            up_dual_j = ups_a[j][..., :, None, :] * dual[..., None, :, None]
            dn_phi_j = dns_a[j][..., :, None, :] * phi[..., None, :, None]
            direct["L9"] -= w_dbl * (
                h1[i, j] * I(hermitian_density(up_dual, doublets[j], DSC, forms))
                + np.conj(h1[j, i]) * I(hermitian_density(doublets[i], up_dual_j, DSC, forms))
                + h2[i, j] * I(hermitian_density(dn_phi, doublets[j], DSC, forms))
                + np.conj(h2[j, i]) * I(hermitian_density(doublets[i], dn_phi_j, DSC, forms))
            )

    ones = np.ones(chart.extents)
    v = params.v
    terms["L91"] = -v / np.sqrt(2) * (
        _yukawa_split(config.up, config.up, h1, w_up, forms, alg, chart, ones)
        + _yukawa_split(config.down, config.down, h2, w_down, forms, alg, chart, ones)
    )
    terms["L92"] = -1 / np.sqrt(2) * (
        _yukawa_split(config.up, config.up, h1, w_up, forms, alg, chart, chi)
        + _yukawa_split(config.down, config.down, h2, w_down, forms, alg, chart, chi)
    )
    mass_terms: dict[str, list[complex]] = {"up": [], "down": [], "up_norm": [], "down_norm": []}
    for i in range(3):
        for key, fields_, h, w in (("up", config.up, h1, w_up), ("down", config.down, h2, w_down)):
            norm = w * I(hermitian_density(fields_[i], fields_[i], C_, forms))
            mass_terms[key].append(-h[i, i].real * v / np.sqrt(2) * norm)
            mass_terms[f"{key}_norm"].append(norm)
    return SectorActions(terms, direct, mass_terms)


def masses_from_mass_terms(mass_terms: list[complex], norms: list[complex], c: float) -> list[float]:
    """Read m off a mass term -m c <psi, psi> Vol evaluated on a constant field."""
    return [float((-term / (c * norm)).real) for term, norm in zip(mass_terms, norms)]


def _constant_spinor(chart: Chart, rng: np.random.Generator, extra: tuple[int, ...] = ()) -> np.ndarray:
    value = rng.normal(size=(4,) + extra) + 1j * rng.normal(size=(4,) + extra)
    return np.broadcast_to(value, chart.extents + value.shape).copy()


def extract_lepton_masses(h, v: float, bg: Background, rng: np.random.Generator) -> list[float]:
    """Masses read off L71 for constant charged-lepton fields with vanishing bosons."""
    chart = bg.chart
    charged = np.stack([_constant_spinor(chart, rng) for _ in range(3)])
    config = LeptonConfig(charged, np.zeros_like(charged), np.asarray(h, dtype=float))
    params = HiggsParams.vacuum_consistent(mu=1.0, v=v, m_phi=0.5)
    actions = lepton_sector_actions(config, BosonFields.zero(chart), params, bg)
    return masses_from_mass_terms(actions.mass_terms["L71"], actions.mass_terms["norm"], bg.constants.c)


def extract_quark_masses(h1, h2, v: float, mode: str, bg: Background, rng: np.random.Generator) -> dict[str, float]:
    """Masses read off the Yukawa integral L91 with one constant quark field switched on at a time."""
    h1, h2 = np.asarray(h1, complex), np.asarray(h2, complex)
    check_quark_couplings(h1, h2, mode)
    if mode == "general":
        raise ValueError("individual quark masses are undefined for general couplings")
    chart, forms, c = bg.chart, bg.forms, bg.constants.c
    alg = gamma_algebra()
    ones = np.ones(chart.extents)
    out = {}
    for names, h, w in ((UP_NAMES, h1, bg.u1_power(4)), (DOWN_NAMES, h2, bg.u1_power(-2))):
        for i, name in enumerate(names):
            fields_ = np.zeros((3,) + chart.extents + (4, 3), complex)
            fields_[i] = _constant_spinor(chart, rng, (3,))
            L91 = -v / np.sqrt(2) * _yukawa_split(fields_, fields_, h, w, forms, alg, chart, ones)
            norm = w * complex(integrate(hermitian_density(fields_[i], fields_[i], (DIRAC, SU3), forms), chart))
            out[name] = masses_from_mass_terms([L91], [norm], c)[0]
    return out
