"""Higgs doublet: norms, potential, kinetic density, field equation and vacuum geometry."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundles import HIGGS, FiberForms
from .connections import VACUUM_PRESETS, ConnectionSet, PhysicalConstants, covariant_derivative
from .manifold import Chart, integrate


@dataclass(frozen=True)
class HiggsParams:
    lam: float
    mu: float
    v: float
    m_phi: float
    m_chi: float

    @classmethod
    def vacuum_consistent(cls, mu: float, v: float, m_phi: float) -> "HiggsParams":
        """lambda = mu^2 / v^2 and m_chi = 2 m_phi."""
        if v <= 0 or m_phi <= 0:
            raise ValueError("v and m_phi must be positive")
        return cls(lam=mu**2 / v**2, mu=mu, v=v, m_phi=m_phi, m_chi=2 * m_phi)


def hermitian_pair(x: np.ndarray, y: np.ndarray, D: np.ndarray) -> np.ndarray:
    """sum D_{a abar} x^a conj(y^abar) along the last axis."""
    return np.einsum("...a,ab,...b->...", x, D, y.conj())


def higgs_norm2(phi: np.ndarray, forms: FiberForms) -> np.ndarray:
    """|phi|^2 = D_11^3 sum D_{alpha alphabar} phi^alpha conj(phi^alphabar)."""
    return forms.u1_D**3 * hermitian_pair(phi, phi, forms.su2_D).real


def higgs_potential(phi: np.ndarray, params: HiggsParams, forms: FiberForms) -> np.ndarray:
    n2 = higgs_norm2(phi, forms)
    return params.lam * n2**2 - params.mu**2 * n2


def kinetic_density(grad: np.ndarray, g_inv: np.ndarray, D: np.ndarray, weight: float) -> np.ndarray:
    """weight * sum g^{ij} D_{a abar} X_i^a conj(X_j^abar) for X[..., i, a]."""
    return weight * np.einsum("...ij,...ia,ab,...jb->...", g_inv, grad, D, grad.conj()).real


def higgs_kinetic2(phi: np.ndarray, connections: ConnectionSet, forms: FiberForms, chart: Chart) -> np.ndarray:
    grad = covariant_derivative(phi, HIGGS, connections, chart)
    return kinetic_density(grad, chart.inverse_metric, forms.su2_D, forms.u1_D**3)


def higgs_actions(
    phi: np.ndarray,
    params: HiggsParams,
    connections: ConnectionSet,
    forms: FiberForms,
    chart: Chart,
    constants: PhysicalConstants,
) -> dict[str, float]:
    hbar, c = constants.hbar, constants.c
    kin = higgs_kinetic2(phi, connections, forms, chart)
    pot = higgs_potential(phi, params, forms)
    return {
        "L4": hbar**2 / (2 * params.m_phi * c) * integrate(kin, chart),
        "L5": -params.m_phi * c / 2 * integrate(pot, chart),
    }


def higgs_box(phi: np.ndarray, connections: ConnectionSet, chart: Chart) -> np.ndarray:
    """sum g^{ij} nabla_i nabla_j phi, the outer derivative acting on the covector slot too."""
    grad = covariant_derivative(phi, HIGGS, connections, chart)
    hess = covariant_derivative(grad, HIGGS, connections, chart, covector=True)
    return np.einsum("...ij,...ija->...a", chart.inverse_metric, hess)


def kgf_residual(
    phi: np.ndarray,
    params: HiggsParams,
    connections: ConnectionSet,
    forms: FiberForms,
    chart: Chart,
    constants: PhysicalConstants,
    mass: float | None = None,
) -> np.ndarray:
    """Euler-Lagrange expression of L4 + L5 with respect to conj(phi).

    -(hbar^2 / 2 m c) box(phi) - (m c / 2)(2 lambda |phi|^2 - mu^2) phi, with
    m = m_phi by default.  For that mass the first variation of the action
    along delta(phi) is 2 Re integral <delta phi, residual>.
    """
    m = params.m_phi if mass is None else mass
    hbar, c = constants.hbar, constants.c
    box = higgs_box(phi, connections, chart)
    n2 = higgs_norm2(phi, forms)
    return -(hbar**2) / (2 * m * c) * box - m * c / 2 * (2 * params.lam * n2 - params.mu**2)[..., None] * phi


def vacuum_higgs(chart: Chart, vacuum: str, v: float, direction: np.ndarray | None = None) -> np.ndarray:
    """Covariantly constant Higgs field of norm v/sqrt(2) over a vacuum preset.

    The preset has constant commuting coordinate components, so the field is
    exp(-x^mu (A_mu + 3 A1_mu)) applied to a constant doublet.
    """
    p = VACUUM_PRESETS[vacuum]
    direction = np.array([1.0, 0.0], complex) if direction is None else np.asarray(direction, complex)
    phi0 = v / np.sqrt(2) * direction / np.linalg.norm(direction)
    gen = np.einsum("m...,mab->...ab", chart.coords, p.su2 + 3 * p.u1[:, None, None] * np.eye(2))
    vals, vecs = np.linalg.eig(-gen)
    expo = vecs @ (np.exp(vals)[..., None] * np.linalg.inv(vecs))
    return np.einsum("...ab,b->...a", expo, phi0)


def d_orthonormal_completion(u: np.ndarray, forms: FiberForms) -> np.ndarray:
    """Second D-orthonormal basis vector, seeded by the d-dual of ``u``."""
    D = forms.su2_D
    seed = np.einsum("ab,bc,...c->...a", forms.su2_d_up, D, u.conj())
    w = seed - hermitian_pair(seed, u, D)[..., None] * u
    return w / np.sqrt(hermitian_pair(w, w, D).real)[..., None]


def align_unitary(v_from: np.ndarray, v_to: np.ndarray, forms: FiberForms, tol: float = 1e-10) -> np.ndarray:
    """A D-unitary, unit-determinant Omega with Omega v_from = v_to.

    Works pointwise on stacks of 2-vectors; both inputs must have unit norm.
    """
    v_from = np.asarray(v_from, complex)
    v_to = np.asarray(v_to, complex)
    for name, vec in (("v_from", v_from), ("v_to", v_to)):
        if np.any(np.abs(higgs_norm2(vec, forms) - 1) > tol):
            raise ValueError(f"{name} must have unit norm")
    D = forms.su2_D
    u1 = v_from / np.sqrt(hermitian_pair(v_from, v_from, D).real)[..., None]
    w1 = v_to / np.sqrt(hermitian_pair(v_to, v_to, D).real)[..., None]
    U = np.stack([u1, d_orthonormal_completion(u1, forms)], axis=-1)
    W = np.stack([w1, d_orthonormal_completion(w1, forms)], axis=-1)
    # both bases are D-orthonormal, so the determinant ratio is a pure phase
    phase = np.linalg.det(W) / np.linalg.det(U)
    W[..., :, 1] /= phase[..., None]
    return W @ np.linalg.inv(U)


def perturb_vacuum(phi_vac: np.ndarray, chi: np.ndarray, v: float, forms: FiberForms, tol: float = 1e-8) -> np.ndarray:
    """phi = (1 + chi / v) phi_vac."""
    if np.any(np.abs(higgs_norm2(phi_vac, forms) - v**2 / 2) > tol * max(1.0, v**2)):
        raise ValueError("phi_vac must have norm v / sqrt(2)")
    chi = np.asarray(chi, dtype=float)
    if np.any(chi <= -v):
        raise ValueError("perturbation collapses the Higgs norm (chi <= -v somewhere)")
    return (1 + chi / v)[..., None] * phi_vac


def decompose_perturbation(phi_vac: np.ndarray, xi: np.ndarray, v: float, forms: FiberForms) -> tuple[np.ndarray, np.ndarray]:
    """Write phi_vac + xi as (1 + chi / v) Omega phi_vac; returns (chi, Omega)."""
    phi = phi_vac + xi
    v_new = np.sqrt(2 * higgs_norm2(phi, forms))
    omega = align_unitary(np.sqrt(2) / v * phi_vac, np.sqrt(2) * phi / v_new[..., None], forms)
    return v_new - v, omega


def potential_polynomial(params: HiggsParams) -> tuple[float, float, float, float, float]:
    """Coefficients of chi^4 .. chi^0 in V((1 + chi / v) phi_vac)."""
    lam, mu2, v = params.lam, params.mu**2, params.v
    return (
        lam / 4,
        lam * v,
        1.5 * lam * v**2 - mu2 / 2,
        lam * v**3 - mu2 * v,
        lam * v**4 / 4 - mu2 * v**2 / 2,
    )



def kgf_variation_check(
    phi: np.ndarray,
    dphi: np.ndarray,
    params: HiggsParams,
    connections: ConnectionSet,
    forms: FiberForms,
    chart: Chart,
    constants: PhysicalConstants,
    eps: float = 1e-5,
) -> tuple[float, float]:
    """Central-difference derivative of L4 + L5 along ``dphi`` and 2 Re integral <residual, dphi>.

    The two agree to O(h^2) when ``dphi`` vanishes near the chart boundary.
    """

    def action(t: float) -> float:
        return float(np.real(sum(higgs_actions(phi + t * dphi, params, connections, forms, chart, constants).values())))

    fd = (action(eps) - action(-eps)) / (2 * eps)
    res = kgf_residual(phi, params, connections, forms, chart, constants)
    predicted = 2 * np.real(integrate(forms.u1_D**3 * hermitian_pair(res, dphi, forms.su2_D), chart))
    return fd, float(predicted)
