"""Curvature of the gauge connections, field strengths and gauge kinetic actions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bundles import FiberForms
from .connections import ConnectionSet, GaugePotentials, PhysicalConstants, compose_gauge
from .manifold import Chart, integrate, lie_derivatives


@dataclass(frozen=True, eq=False)
class CurvatureField:
    """u1[..., i, j]; su2[..., i, j, p, k] = R^p_{k ij}; su3 likewise."""

    u1: np.ndarray
    su2: np.ndarray
    su3: np.ndarray


@dataclass(frozen=True, eq=False)
class FieldStrength:
    """u1[..., i, j] (real); su2[..., i, j, p, k]; su3[..., i, j, p, k]."""

    u1: np.ndarray
    su2: np.ndarray
    su3: np.ndarray
    warnings: tuple[str, ...] = field(default=())


def exterior_derivative(A: np.ndarray, chart: Chart) -> np.ndarray:
    """L_i A_j - L_j A_i - c^h_ij A_h for a covector-valued field A[..., k, *fiber].

    The Levi-Civita terms of the antisymmetrized covariant derivative cancel
    against the structure constants, leaving this reduced form.
    """
    dA = lie_derivatives(A, chart)
    fiber = A.shape[len(chart.extents) + 1 :]
    flat = A.reshape(chart.extents + (4, -1))
    c_term = np.einsum("...hij,...hn->...ijn", chart.structure.c, flat).reshape(chart.extents + (4, 4) + fiber)
    return dA - np.swapaxes(dA, 4, 5) - c_term


def wedge_commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """A_i B_j - B_j A_i as a field [..., i, j, p, k] of matrices."""
    Ai = A[..., :, None, :, :]
    Bj = B[..., None, :, :, :]
    return Ai @ Bj - Bj @ Ai


def connection_curvature(A: np.ndarray, chart: Chart) -> np.ndarray:
    """L_i A_j - L_j A_i + [A_i, A_j] - c^h_ij A_h for a matrix-valued connection."""
    return exterior_derivative(A, chart) + wedge_commutator(A, A)


def curvature(connections: ConnectionSet, chart: Chart) -> CurvatureField:
    return CurvatureField(
        u1=exterior_derivative(connections.u1, chart),
        su2=connection_curvature(connections.su2, chart),
        su3=connection_curvature(connections.su3, chart),
    )


def _max(x: np.ndarray) -> float:
    return float(np.abs(x).max(initial=0.0))


def _hermitian_type(M: np.ndarray, D: np.ndarray, sign: int) -> np.ndarray:
    """sum_k M^k_p D_{k qbar} + sign * sum_k D_{p kbar} conj(M^kbar_qbar)."""
    return np.swapaxes(M, -1, -2) @ D + sign * D @ M.conj()


def _raised(M: np.ndarray, d_up: np.ndarray) -> np.ndarray:
    """M^{pq} = sum_k M^p_k d^{kq}."""
    return M @ d_up


def _lowered(M: np.ndarray, d: np.ndarray) -> np.ndarray:
    """M_{pq} = sum_k d_{kp} M^k_q."""
    return np.swapaxes(d, -1, -2) @ M


def _skew3(M: np.ndarray, d_up: np.ndarray) -> np.ndarray:
    return (
        np.einsum("...pk,kqm->...pqm", M, d_up)
        + np.einsum("...qk,pkm->...pqm", M, d_up)
        + np.einsum("...mk,pqk->...pqm", M, d_up)
    )


def _quadratic(M: np.ndarray, D: np.ndarray, D_up: np.ndarray, sign: int) -> np.ndarray:
    """sum D^{q qbar} D_{p pbar} M^p_q(ij) conj(M^pbar_qbar(mn)) - sign * sum M^p_q(ij) M^q_p(mn)."""
    herm = np.einsum("qr,ps,...ijpq,...mnsr->...ijmn", D_up, D, M, M.conj(), optimize=True)
    plain = np.einsum("...ijpq,...mnqp->...ijmn", M, M, optimize=True)
    return herm - sign * plain


def curvature_identity_residuals(curv: CurvatureField, forms: FiberForms, chart: Chart | None = None) -> dict[str, float]:
    """Algebraic identities every curvature of a concordant connection set obeys."""
    inner = (Ellipsis,) if chart is None else chart.interior()
    R1, R2, R3 = curv.u1[inner], curv.su2[inner], curv.su3[inner]
    raised = _raised(R2, forms.su2_d_up)
    lowered = _lowered(R2, forms.su2_d)
    return {
        "u1_imaginary": _max(R1 + R1.conj()),
        "su2_skew_hermitian": _max(_hermitian_type(R2, forms.su2_D, +1)),
        "su3_skew_hermitian": _max(_hermitian_type(R3, forms.su3_D, +1)),
        "su2_skew_form": _max(raised - np.swapaxes(raised, -1, -2)),
        "su3_skew_form": _max(_skew3(R3, forms.su3_d_up)),
        "su3_trace": _max(np.trace(R3, axis1=-2, axis2=-1)),
        "su2_trace": _max(np.trace(R2, axis1=-2, axis2=-1)),
        "su2_lowered_symmetric": _max(lowered - np.swapaxes(lowered, -1, -2)),
        "u1_quadratic": _max(
            np.einsum("...ij,...mn->...ijmn", R1, R1.conj()) + np.einsum("...ij,...mn->...ijmn", R1, R1)
        ),
        "su2_quadratic": _max(_quadratic(R2, forms.su2_D, forms.su2_D_up, -1)),
        "su3_quadratic": _max(_quadratic(R3, forms.su3_D, forms.su3_D_up, -1)),
    }


def curvature_norm(curv: CurvatureField, chart: Chart | None = None) -> float:
    inner = (Ellipsis,) if chart is None else chart.interior()
    return max(_max(curv.u1[inner]), _max(curv.su2[inner]), _max(curv.su3[inner]))


def nonabelian_field_strength(CA: np.ndarray, vacuum: np.ndarray, kappa: float, chart: Chart) -> np.ndarray:
    """nabla_i CA_j - nabla_j CA_i - i kappa [CA_i, CA_j] with the vacuum connection in nabla."""
    return (
        exterior_derivative(CA, chart)
        + wedge_commutator(vacuum, CA)
        - np.swapaxes(wedge_commutator(vacuum, CA), 4, 5)
        - 1j * kappa * wedge_commutator(CA, CA)
    )


def field_strength(potentials: GaugePotentials, vacuum: ConnectionSet, chart: Chart, flat_tol: float | None = None) -> FieldStrength:
    """Field strengths of the non-vacuum potentials over a flat vacuum."""
    _, k2, k3 = potentials.kappas
    notes = []
    flat_tol = 10 * chart.h**2 if flat_tol is None else flat_tol
    vac_norm = curvature_norm(curvature(vacuum, chart), chart)
    if vac_norm > flat_tol:
        notes.append(f"vacuum curvature {vac_norm:.3g} exceeds flatness tolerance {flat_tol:.3g}")
    return FieldStrength(
        u1=exterior_derivative(potentials.u1, chart),
        su2=nonabelian_field_strength(potentials.su2, vacuum.su2, k2, chart),
        su3=nonabelian_field_strength(potentials.su3, vacuum.su3, k3, chart),
        warnings=tuple(notes),
    )


def field_strength_constraint_residuals(F: FieldStrength, forms: FiberForms, chart: Chart | None = None) -> dict[str, float]:
    """Reality, Hermiticity-type, d-form and quadratic identities of field strengths."""
    inner = (Ellipsis,) if chart is None else chart.interior()
    F1, F2, F3 = F.u1[inner], F.su2[inner], F.su3[inner]
    dd = np.swapaxes(F2, -1, -2) @ forms.su2_d
    skew3 = (
        np.einsum("kqm,...kp->...pqm", forms.su3_d, F3)
        + np.einsum("pkm,...kq->...pqm", forms.su3_d, F3)
        + np.einsum("pqk,...km->...pqm", forms.su3_d, F3)
    )
    F1c = np.asarray(F1, dtype=complex)
    return {
        "u1_real": _max(np.imag(F1c)),
        "su2_hermitian": _max(_hermitian_type(F2, forms.su2_D, -1)),
        "su3_hermitian": _max(_hermitian_type(F3, forms.su3_D, -1)),
        "su2_skew_form": _max(dd - np.swapaxes(dd, -1, -2)),
        "su3_skew_form": _max(skew3),
        "u1_quadratic": _max(
            np.einsum("...ij,...mn->...ijmn", F1c, F1c.conj()) - np.einsum("...ij,...mn->...ijmn", F1c, F1c)
        ),
        "su2_quadratic": _max(_quadratic(F2, forms.su2_D, forms.su2_D_up, +1)),
        "su3_quadratic": _max(_quadratic(F3, forms.su3_D, forms.su3_D_up, +1)),
    }


def contract_pair(F: np.ndarray, G: np.ndarray, g_inv: np.ndarray) -> np.ndarray:
    """sum g^{im} g^{jn} F_ij G_mn for scalar-valued two-forms."""
    return np.einsum("...im,...jn,...ij,...mn->...", g_inv, g_inv, F, G)


def contract_trace(F: np.ndarray, G: np.ndarray, g_inv: np.ndarray) -> np.ndarray:
    """sum g^{im} g^{jn} tr(F_ij G_mn) for matrix-valued two-forms."""
    return np.einsum("...im,...jn,...ijpq,...mnqp->...", g_inv, g_inv, F, G)


def gauge_kinetic_actions(F: FieldStrength, chart: Chart, constants: PhysicalConstants) -> dict[str, complex]:
    g_inv = chart.inverse_metric
    c = constants.c
    return {
        "L1": -integrate(contract_pair(F.u1, F.u1, g_inv), chart) / (16 * np.pi * c),
        "L2": -integrate(contract_trace(F.su2, F.su2, g_inv), chart) / (32 * np.pi * c),
        "L3": -integrate(contract_trace(F.su3, F.su3, g_inv), chart) / (48 * np.pi * c),
    }


def composed_curvature_residuals(potentials: GaugePotentials, vacuum: ConnectionSet, chart: Chart) -> dict[str, float]:
    """Curvature of vacuum - i kappa CA against -i kappa times the field strength, per bundle."""
    k1, k2, k3 = potentials.kappas
    R = curvature(compose_gauge(vacuum, potentials), chart)
    F = field_strength(potentials, vacuum, chart, flat_tol=np.inf)
    inner = chart.interior()
    return {
        "u1": _max((R.u1 + 1j * k1 * F.u1)[inner]),
        "su2": _max((R.su2 + 1j * k2 * F.su2)[inner]),
        "su3": _max((R.su3 + 1j * k3 * F.su3)[inner]),
    }
