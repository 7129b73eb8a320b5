"""Electroweak symmetry breaking: vacuum frame operators, the A/Z rotation,
SU(2) potential expansion, boson field strengths and the bosonic Lagrangian split."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundles import FiberForms
from .connections import ConnectionSet, GaugePotentials, PhysicalConstants
from .curvature import contract_pair, exterior_derivative, field_strength, gauge_kinetic_actions
from .higgs import hermitian_pair, higgs_norm2
from .manifold import Chart, integrate


def _max(x: np.ndarray) -> float:
    return float(np.abs(x).max(initial=0.0))


def _outer(vec: np.ndarray, covec: np.ndarray) -> np.ndarray:
    """M[..., beta, alpha] = vec^beta covec_alpha."""
    return vec[..., :, None] * covec[..., None, :]


@dataclass(frozen=True, eq=False)
class VacuumFrame:
    """Operators built from a Higgs vacuum doublet.

    Matrices are indexed [..., beta, alpha] and act on doublets by
    (M x)^beta = sum_alpha M[beta, alpha] x^alpha.  ``Wfp`` sends the vacuum
    to its dual and ``Wpf`` sends the dual back.
    """

    phi_vac: np.ndarray
    phi_dual: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    Wfp: np.ndarray
    Wpf: np.ndarray
    v: float
    u1_D: float

    def identity_residuals(self) -> dict[str, float]:
        P, Q, Wfp, Wpf = self.P, self.Q, self.Wfp, self.Wpf
        eye = np.eye(2)
        return {
            "P+Q=I": _max(P + Q - eye),
            "PP=P": _max(P @ P - P),
            "QQ=Q": _max(Q @ Q - Q),
            "PQ=0": _max(P @ Q),
            "QP=0": _max(Q @ P),
            "Wfp Wfp=0": _max(Wfp @ Wfp),
            "Wpf Wpf=0": _max(Wpf @ Wpf),
            "Wfp Wpf=Q": _max(Wfp @ Wpf - Q),
            "Wpf Wfp=P": _max(Wpf @ Wfp - P),
            "P Wfp=0": _max(P @ Wfp),
            "Q Wfp=Wfp": _max(Q @ Wfp - Wfp),
            "Wfp P=Wfp": _max(Wfp @ P - Wfp),
            "Wfp Q=0": _max(Wfp @ Q),
            "P Wpf=Wpf": _max(P @ Wpf - Wpf),
            "Q Wpf=0": _max(Q @ Wpf),
            "Wpf P=0": _max(Wpf @ P),
            "Wpf Q=Wpf": _max(Wpf @ Q - Wpf),
        }

    def invariant_residuals(self, forms: FiberForms) -> dict[str, float]:
        """Orthogonality, equal norms and D-Hermiticity of the projectors."""
        D = forms.su2_D
        n_vac = higgs_norm2(self.phi_vac, forms)
        n_dual = self.u1_D**-3 * hermitian_pair(self.phi_dual, self.phi_dual, D).real
        herm = lambda M: _max(np.swapaxes(M, -1, -2) @ D - D @ M.conj())  # noqa: E731
        return {
            "dual orthogonal": _max(hermitian_pair(self.phi_vac, self.phi_dual, D)),
            "vacuum norm": _max(n_vac - self.v**2 / 2),
            "dual norm": _max(n_dual - self.v**2 / 2),
            "P hermitian": herm(self.P),
            "Q hermitian": herm(self.Q),
        }


def build_vacuum_frame(phi_vac: np.ndarray, forms: FiberForms, tol: float = 1e-12) -> VacuumFrame:
    """Projectors P, Q, dual doublet and nilpotent swaps of a nonvanishing vacuum."""
    phi = np.asarray(phi_vac, dtype=complex)
    n2 = higgs_norm2(phi, forms)
    if np.any(n2 <= 0) or not np.all(np.isfinite(n2)):
        idx = np.unravel_index(int(np.argmin(n2)), n2.shape) if n2.ndim else ()
        raise ValueError(f"Higgs vacuum norm vanishes at grid index {tuple(int(i) for i in idx)}")
    Dbar = forms.u1_D
    D = forms.su2_D
    # covector D_{alpha alphabar} Dbar^3 conj(phi^alphabar)
    phi_co = Dbar**3 * np.einsum("ab,...b->...a", D, phi.conj())
    dual = np.einsum("ab,...b->...a", forms.su2_d_up, phi_co)
    dual_co = Dbar**-3 * np.einsum("ab,...b->...a", D, dual.conj())
    dual_n2 = np.einsum("...a,...a->...", dual_co, dual).real
    P = _outer(phi, phi_co) / n2[..., None, None]
    Q = _outer(dual, dual_co) / dual_n2[..., None, None]
    Wfp = _outer(dual, phi_co) / n2[..., None, None]
    Wpf = _outer(phi, dual_co) / dual_n2[..., None, None]
    v = float(np.sqrt(2 * n2.mean()))
    frame = VacuumFrame(phi, dual, P, Q, Wfp, Wpf, v, Dbar)
    scale = max(1.0, v**2)
    checks = frame.identity_residuals() | frame.invariant_residuals(forms)
    checks["vacuum norm"] = _max(n2 - n2.mean()) / scale
    checks["dual norm"] = _max(dual_n2 - n2) / scale
    bad = {k: r for k, r in checks.items() if r > tol * (1 if "norm" in k else 10)}
    if bad:
        raise ValueError(f"vacuum frame identities violated: {bad}")
    return frame


def _pair(M: np.ndarray, CA: np.ndarray) -> np.ndarray:
    """tr(M CA_k) for an operator field M[..., 2, 2] and CA[..., k, 2, 2]."""
    return np.einsum("...ba,...kab->...k", M, CA)


@dataclass(frozen=True, eq=False)
class SU2Expansion:
    """Coefficients of CA = A+ P + A- Q + W+ Wfp + W- Wpf, one per frame slot k."""

    A_plus: np.ndarray
    A_minus: np.ndarray
    Wplus: np.ndarray
    Wminus: np.ndarray
    residuals: dict[str, float]

    @property
    def A3(self) -> np.ndarray:
        return ((self.A_minus - self.A_plus) / 2).real


def _combine(frame: VacuumFrame, A_plus, A_minus, Wplus, Wminus) -> np.ndarray:
    op = lambda M: M[..., None, :, :]  # noqa: E731
    s = lambda c: np.asarray(c)[..., None, None]  # noqa: E731
    return s(A_plus) * op(frame.P) + s(A_minus) * op(frame.Q) + s(Wplus) * op(frame.Wfp) + s(Wminus) * op(frame.Wpf)


def expand_su2_tensor(CA: np.ndarray, frame: VacuumFrame) -> SU2Expansion:
    """Extract the frame coefficients of an SU(2) potential by trace pairings."""
    CA = np.asarray(CA, dtype=complex)
    A_plus, A_minus = _pair(frame.P, CA), _pair(frame.Q, CA)
    Wplus, Wminus = _pair(frame.Wpf, CA), _pair(frame.Wfp, CA)
    scale = max(1.0, _max(CA))
    recon = _combine(frame, A_plus, A_minus, Wplus, Wminus)
    return SU2Expansion(
        A_plus,
        A_minus,
        Wplus,
        Wminus,
        {
            "reconstruction": _max(CA - recon) / scale,
            "A+ real": _max(A_plus.imag) / scale,
            "A- real": _max(A_minus.imag) / scale,
            "A- = -A+": _max(A_plus + A_minus) / scale,
            "W- = Dbar^6 conj(W+)": _max(Wminus - frame.u1_D**6 * Wplus.conj()) / scale,
        },
    )


@dataclass(frozen=True, eq=False)
class VacuumPreservingSolution:
    A_plus: np.ndarray
    A_minus: np.ndarray
    Wplus: np.ndarray
    Wminus: np.ndarray
    residual: float


def vacuum_preserving_residual(CA: np.ndarray, uCA: np.ndarray, frame: VacuumFrame, g1: float, g2: float) -> float:
    """max |g2 CA_k phi + 3 g1 uCA_k phi|, zero when the vacuum stays covariantly constant."""
    phi = frame.phi_vac[..., None, :]
    lhs = g2 * np.einsum("...kab,...kb->...ka", CA, np.broadcast_to(phi, CA.shape[:-1])) + 3 * g1 * uCA[..., None] * phi
    return _max(lhs)


def solve_vacuum_preserving(frame: VacuumFrame, g1: float, g2: float, uCA: np.ndarray) -> VacuumPreservingSolution:
    """Least-squares solve of the vacuum-preserving condition for the SU(2) coefficients.

    Unknowns are the real and imaginary parts of (A+, A-, W+, W-).  The rows
    are the doublet equation g2 CA phi = -3 g1 uCA phi together with the
    reality, opposition and conjugation constraints of an admissible potential.
    """
    if g2 == 0:
        raise ValueError("g2 must be nonzero")
    phi = frame.phi_vac
    uCA = np.asarray(uCA, dtype=float)
    ops = [frame.P, frame.Q, frame.Wfp, frame.Wpf]
    grid = phi.shape[:-1]
    rows = np.zeros(grid + (10, 8))
    for n, M in enumerate(ops):
        image = g2 * np.einsum("...ab,...b->...a", M, phi)
        for part, factor in ((0, 1.0), (1, 1j)):
            col = 2 * n + part
            z = factor * image
            rows[..., 0:2, col] = z.real
            rows[..., 2:4, col] = z.imag
    # Im A+ = 0, Im A- = 0
    rows[..., 4, 1] = rows[..., 5, 3] = 1.0
    # A+ + A- = 0
    rows[..., 6, 0] = rows[..., 6, 2] = 1.0
    rows[..., 7, 1] = rows[..., 7, 3] = 1.0
    # W- - Dbar^6 conj(W+) = 0
    d6 = frame.u1_D**6
    rows[..., 8, 6], rows[..., 8, 4] = 1.0, -d6
    rows[..., 9, 7], rows[..., 9, 5] = 1.0, d6
    pinv = np.linalg.pinv(rows)
    rhs_c = -3 * g1 * uCA[..., None] * phi[..., None, :]
    rhs = np.zeros(uCA.shape + (10,))
    rhs[..., 0:2], rhs[..., 2:4] = rhs_c.real, rhs_c.imag
    x = np.einsum("...uv,...kv->...ku", pinv, rhs)
    resid = np.einsum("...vu,...ku->...kv", rows, x) - rhs
    coef = x[..., 0::2] + 1j * x[..., 1::2]
    return VacuumPreservingSolution(coef[..., 0], coef[..., 1], coef[..., 2], coef[..., 3], _max(resid))


def mixing_norm(g1: float, g2: float) -> float:
    """sqrt(g2^2 + (3 g1)^2)."""
    s = float(np.hypot(g2, 3 * g1))
    if s == 0:
        raise ValueError("g1 and g2 cannot both vanish")
    return s


def az_rotation(A3: np.ndarray, uCA: np.ndarray, g1: float, g2: float) -> tuple[np.ndarray, np.ndarray]:
    """(Z, A) from the neutral SU(2) coefficient and the U(1) potential."""
    s = mixing_norm(g1, g2)
    return (-g2 * A3 + 3 * g1 * uCA) / s, (3 * g1 * A3 + g2 * uCA) / s


def az_inverse(A: np.ndarray, Z: np.ndarray, g1: float, g2: float) -> tuple[np.ndarray, np.ndarray]:
    """(A3, uCA) from the photon and Z fields."""
    s = mixing_norm(g1, g2)
    return (3 * g1 * A - g2 * Z) / s, (g2 * A + 3 * g1 * Z) / s


def recompose_su2(
    A: np.ndarray, Z: np.ndarray, Wplus: np.ndarray, Wminus: np.ndarray, frame: VacuumFrame, g1: float, g2: float
) -> np.ndarray:
    """CA = A3 (Q - P) + W+ Wfp + W- Wpf with A3 = (3 g1 A - g2 Z) / s."""
    A3, _ = az_inverse(A, Z, g1, g2)
    return _combine(frame, -A3, A3, Wplus, Wminus)


@dataclass(frozen=True, eq=False)
class BrokenPotentials:
    """Photon, Z and W fields over a vacuum frame, each [..., k]."""

    A: np.ndarray
    Z: np.ndarray
    Wplus: np.ndarray
    Wminus: np.ndarray
    g1: float
    g2: float

    @property
    def A3(self) -> np.ndarray:
        return az_inverse(self.A, self.Z, self.g1, self.g2)[0]

    @property
    def uCA(self) -> np.ndarray:
        return az_inverse(self.A, self.Z, self.g1, self.g2)[1]

    @property
    def s(self) -> float:
        return mixing_norm(self.g1, self.g2)

    def su2(self, frame: VacuumFrame) -> np.ndarray:
        return recompose_su2(self.A, self.Z, self.Wplus, self.Wminus, frame, self.g1, self.g2)

    def gauge_potentials(self, frame: VacuumFrame, constants: PhysicalConstants, su3: np.ndarray | None = None, g3: float = 1.0) -> GaugePotentials:
        su2 = self.su2(frame)
        su3 = np.zeros(su2.shape[:-2] + (3, 3), complex) if su3 is None else su3
        return GaugePotentials(self.uCA, su2, su3, self.g1, self.g2, g3, constants)

    def conjugation_residual(self, u1_D: float = 1.0) -> float:
        return _max(self.Wminus - u1_D**6 * self.Wplus.conj())

    @classmethod
    def from_su2(cls, CA: np.ndarray, uCA: np.ndarray, frame: VacuumFrame, g1: float, g2: float) -> tuple["BrokenPotentials", SU2Expansion]:
        exp = expand_su2_tensor(CA, frame)
        Z, A = az_rotation(exp.A3, np.asarray(uCA).real, g1, g2)
        return cls(A, Z, exp.Wplus, exp.Wminus, g1, g2), exp


def _wedge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a_i b_j - a_j b_i for covector fields [..., k]."""
    return a[..., :, None] * b[..., None, :] - a[..., None, :] * b[..., :, None]


def boson_field_strengths(
    bp: BrokenPotentials, vacuum: ConnectionSet, chart: Chart, constants: PhysicalConstants
) -> dict[str, np.ndarray]:
    """F, Zcal and the dressed W field strengths, each [..., i, j].

    The W fields carry U(1) weight +6 / -6, so their vacuum derivative picks
    up the vacuum U(1) connection; the dressing term uses uCA = (g2 A + 3 g1 Z) / s.
    """
    kappa1 = constants.e * bp.g1 / (constants.hbar * constants.c)
    u1v, uCA = vacuum.u1, bp.uCA
    Wp = exterior_derivative(bp.Wplus, chart) + 6 * _wedge(u1v, bp.Wplus) - 6j * kappa1 * _wedge(uCA, bp.Wplus)
    Wm = exterior_derivative(bp.Wminus, chart) - 6 * _wedge(u1v, bp.Wminus) + 6j * kappa1 * _wedge(uCA, bp.Wminus)
    return {
        "F": exterior_derivative(bp.A, chart),
        "Zcal": exterior_derivative(bp.Z, chart),
        "Wcal_plus": Wp,
        "Wcal_minus": Wm,
    }


def closed_form_field_strengths(
    bp: BrokenPotentials, frame: VacuumFrame, vacuum: ConnectionSet, chart: Chart, constants: PhysicalConstants
) -> tuple[np.ndarray, np.ndarray]:
    """(U(1) field strength, SU(2) field strength [..., i, j, p, q]) written through A, Z, W."""
    fs = boson_field_strengths(bp, vacuum, chart, constants)
    kappa = constants.e / (constants.hbar * constants.c)
    s, g1, g2 = bp.s, bp.g1, bp.g2
    X = frame.Q - frame.P
    neutral = (3 * g1 * fs["F"] - g2 * fs["Zcal"]) / s - 1j * kappa * g2 * _wedge(bp.Wplus, bp.Wminus)
    charged_p = fs["Wcal_plus"] + 2j * kappa * s * _wedge(bp.Z, bp.Wplus)
    charged_m = fs["Wcal_minus"] - 2j * kappa * s * _wedge(bp.Z, bp.Wminus)
    op = lambda M: M[..., None, None, :, :]  # noqa: E731
    sc = lambda c: c[..., None, None]  # noqa: E731
    su2 = sc(neutral) * op(X) + sc(charged_p) * op(frame.Wfp) + sc(charged_m) * op(frame.Wpf)
    u1 = (g2 * fs["F"] + 3 * g1 * fs["Zcal"]) / s
    return u1, su2


def expand_field_strength_check(
    bp: BrokenPotentials, frame: VacuumFrame, vacuum: ConnectionSet, chart: Chart, constants: PhysicalConstants
) -> dict[str, float]:
    """Max-norm differences between the direct and closed-form field strengths (interior)."""
    direct = field_strength(bp.gauge_potentials(frame, constants), vacuum, chart)
    u1, su2 = closed_form_field_strengths(bp, frame, vacuum, chart, constants)
    inner = chart.interior()
    return {"u1": _max((direct.u1 - u1)[inner]), "su2": _max((direct.su2 - su2)[inner])}


def boson_lagrangian(
    bp: BrokenPotentials, frame: VacuumFrame, vacuum: ConnectionSet, chart: Chart, constants: PhysicalConstants
) -> dict[str, complex]:
    """The eight electroweak boson terms, plus L1 + L2 from the recomposed potentials.

    Coefficients follow from inserting the closed-form field strengths into
    the U(1) and SU(2) kinetic integrals.
    """
    e, hbar, c = constants.e, constants.hbar, constants.c
    g1, g2, s = bp.g1, bp.g2, bp.s
    kappa = e / (hbar * c)
    g_inv = chart.inverse_metric
    fs = boson_field_strengths(bp, vacuum, chart, constants)
    F, Zc, Wcp, Wcm = fs["F"], fs["Zcal"], fs["Wcal_plus"], fs["Wcal_minus"]
    Wp, Wm, Z = bp.Wplus, bp.Wminus, bp.Z

    def dot(a, b):
        return np.einsum("...ij,...i,...j->...", g_inv, a, b)

    def two_form_vec(T, a, b):
        """sum T^{ij} a_i b_j with both indices of T raised."""
        return np.einsum("...im,...jn,...mn,...i,...j->...", g_inv, g_inv, T, a, b)

    I = lambda f: integrate(f, chart)  # noqa: E731
    quartic_w = dot(Wp, Wp) * dot(Wm, Wm) - dot(Wp, Wm) ** 2
    quartic_zw = dot(Z, Z) * dot(Wp, Wm) - dot(Z, Wp) * dot(Z, Wm)
    terms = {
        "L11": -I(contract_pair(F, F, g_inv)) / (16 * np.pi * c),
        "L12": -I(contract_pair(Zc, Zc, g_inv)) / (16 * np.pi * c),
        "L21": -I(contract_pair(Wcp, Wcm, g_inv)) / (16 * np.pi * c),
        "L22": (kappa * g2) ** 2 / (8 * np.pi * c) * I(quartic_w),
        "L23": 3j * e * g1 * g2 / (4 * np.pi * hbar * c**2 * s) * I(two_form_vec(F, Wp, Wm)),
        "L24": -1j * e * g2**2 / (4 * np.pi * hbar * c**2 * s) * I(two_form_vec(Zc, Wp, Wm)),
        "L25": -(e**2) * s**2 / (2 * np.pi * hbar**2 * c**3) * I(quartic_zw),
        "L26": 1j * e * s / (4 * np.pi * hbar * c**2) * I(two_form_vec(Wcp, Z, Wm) - two_form_vec(Wcm, Z, Wp)),
    }
    gauge = gauge_kinetic_actions(field_strength(bp.gauge_potentials(frame, constants), vacuum, chart), chart, constants)
    terms["L1+L2"] = gauge["L1"] + gauge["L2"]
    return terms


def boson_lagrangian_residual(terms: dict[str, complex]) -> float:
    """|L1 + L2 - sum of the eight split terms|."""
    split = sum(v for k, v in terms.items() if k != "L1+L2")
    return float(abs(terms["L1+L2"] - split))


def boson_lagrangian_relative_residual(terms: dict[str, complex]) -> float:
    """The residual relative to the sum of the split terms' magnitudes.

    The terms can cancel almost completely, so their total size rather than
    L1 + L2 sets the scale of the discretization error.
    """
    scale = sum(abs(v) for k, v in terms.items() if k != "L1+L2")
    return 0.0 if scale == 0 else boson_lagrangian_residual(terms) / scale

