"""Gauge and spinor connections, covariant derivatives and SU(2) gauge transformations."""
from __future__ import annotations

import string
from dataclasses import dataclass, replace

import numpy as np

from .bundles import BundleKind, FiberForms, SpeciesDescriptor
from .manifold import DIM, Chart, lie_derivatives

PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


@dataclass(frozen=True)
class PhysicalConstants:
    e: float
    hbar: float
    c: float


CONSTANTS_PRESETS: dict[str, tuple[str, PhysicalConstants]] = {
    "natural": ("e = hbar = c = 1", PhysicalConstants(1.0, 1.0, 1.0)),
    "cgs-nist": (
        "CGS values of the elementary charge, reduced Planck constant and speed of light",
        PhysicalConstants(4.80420440e-10, 1.05457168e-27, 2.99792458e10),
    ),
}


def physical_constants(name: str) -> PhysicalConstants:
    if name not in CONSTANTS_PRESETS:
        raise KeyError(f"unknown constants preset {name!r}; known: {sorted(CONSTANTS_PRESETS)}")
    return CONSTANTS_PRESETS[name][1]


@dataclass(frozen=True, eq=False)
class ConnectionSet:
    """Connection components in the frame, grid axes first.

    u1[..., k]; su2[..., k, a, i] = A^a_{ki}; su3 likewise with 3x3 blocks;
    spinor[..., k, a, b]; levi_civita[..., h, i, j] = Gamma^h_ij.
    """

    u1: np.ndarray
    su2: np.ndarray
    su3: np.ndarray
    spinor: np.ndarray
    levi_civita: np.ndarray

    @classmethod
    def zero(cls, chart: Chart) -> "ConnectionSet":
        g = chart.extents
        return cls(
            u1=np.zeros(g + (DIM,), complex),
            su2=np.zeros(g + (DIM, 2, 2), complex),
            su3=np.zeros(g + (DIM, 3, 3), complex),
            spinor=np.zeros(g + (DIM, 4, 4), complex),
            levi_civita=chart.christoffel,
        )


@dataclass(frozen=True, eq=False)
class VacuumPreset:
    """A flat gauge vacuum given by constant, mutually commuting coordinate components."""

    description: str
    u1: np.ndarray  # [mu]
    su2: np.ndarray  # [mu, a, i]
    su3: np.ndarray  # [mu, a, i]


def _imaginary_constant() -> VacuumPreset:
    a = np.array([0.2, -0.1, 0.15, 0.05])
    b = np.array([0.3, 0.1, -0.2, 0.25])
    c1 = np.array([0.1, -0.2, 0.05, 0.3])
    c2 = np.array([-0.15, 0.1, 0.2, -0.05])
    su3 = np.zeros((DIM, 3, 3), complex)
    su3[:, 0, 0], su3[:, 1, 1], su3[:, 2, 2] = 1j * c1, 1j * c2, -1j * (c1 + c2)
    return VacuumPreset(
        "u1 = i*a, su2 = i*b*sigma3, su3 = i*diag(c1, c2, -c1-c2), constant in coordinates",
        1j * a,
        1j * b[:, None, None] * PAULI[2],
        su3,
    )


VACUUM_PRESETS: dict[str, VacuumPreset] = {
    "trivial-flat": VacuumPreset(
        "all gauge connections zero",
        np.zeros(DIM, complex),
        np.zeros((DIM, 2, 2), complex),
        np.zeros((DIM, 3, 3), complex),
    ),
    "imaginary-constant": _imaginary_constant(),
}


def vacuum_connections(chart: Chart, preset: str = "trivial-flat", spinor: np.ndarray | None = None) -> ConnectionSet:
    """Flat concordant gauge vacuum; coordinate components are rotated into the frame."""
    if preset not in VACUUM_PRESETS:
        raise KeyError(f"unknown vacuum preset {preset!r}; known: {sorted(VACUUM_PRESETS)}")
    p = VACUUM_PRESETS[preset]
    e = chart.frame
    zero = ConnectionSet.zero(chart)
    return replace(
        zero,
        u1=np.einsum("...mk,m->...k", e, p.u1),
        su2=np.einsum("...mk,mai->...kai", e, p.su2),
        su3=np.einsum("...mk,mai->...kai", e, p.su3),
        spinor=zero.spinor if spinor is None else np.asarray(spinor, complex),
    )


_LETTERS = string.ascii_uppercase


def act_on_slot(matrices: np.ndarray, field: np.ndarray, axis: int, tangent_in: bool) -> np.ndarray:
    """sum_b M[..., k, a, b] f[..., b, ...] on one fiber axis.

    ``axis`` counts fiber axes after the grid (and after a leading tangent slot
    when ``tangent_in``); the result gains a frame axis k right after the grid.
    """
    rest = field.ndim - DIM
    letters = list(_LETTERS[:rest])
    pos = axis + (1 if tangent_in else 0)
    src = letters.copy()
    src[pos] = "z"
    out = "".join(letters)
    return np.einsum(f"...k{letters[pos]}z,...{''.join(src)}->...k{out}", matrices, field)


def covariant_derivative(
    field: np.ndarray,
    species: SpeciesDescriptor,
    connections: ConnectionSet,
    chart: Chart,
    covector: bool = False,
) -> np.ndarray:
    """nabla_k of a species-valued field; the new lower frame slot sits right after the grid.

    With ``covector`` the input carries one lower frame slot j before its fiber
    axes, and the Levi-Civita term -Gamma^h_kj X_h is added.
    """
    expected = chart.extents + ((DIM,) if covector else ()) + species.fiber_shape
    if field.shape != expected:
        raise ValueError(f"{species.name} field must have shape {expected}, got {field.shape}")
    out = lie_derivatives(field, chart).astype(complex)
    blocks = {BundleKind.DIRAC: connections.spinor, BundleKind.SU2: connections.su2, BundleKind.SU3: connections.su3}
    for axis, kind in enumerate(species.slots):
        if kind is BundleKind.DIRAC and not np.any(connections.spinor):
            continue
        out += act_on_slot(blocks[kind], field, axis, covector)
    if species.weight:
        u1 = connections.u1.reshape(chart.extents + (DIM,) + (1,) * (field.ndim - DIM))
        out += species.weight * u1 * field[(slice(None),) * DIM + (None,)]
    if covector:
        flat = field.reshape(chart.extents + (DIM, -1))
        gamma_term = np.einsum("...hkj,...hn->...kjn", connections.levi_civita, flat)
        out -= gamma_term.reshape(out.shape)
    return out


def _max(x: np.ndarray) -> float:
    return float(np.abs(x).max(initial=0.0))


def _form_derivative(form: np.ndarray, chart: Chart, fiber_ndim: int) -> np.ndarray:
    """L_k of a form that may be constant (fiber shape only) or grid-valued."""
    form = np.asarray(form)
    if form.ndim == fiber_ndim:
        return np.zeros(chart.extents + (DIM,) + form.shape)
    return lie_derivatives(form, chart)


def _at(form: np.ndarray, fiber_ndim: int) -> np.ndarray:
    """Insert a frame axis so a (possibly grid-valued) form broadcasts against [..., k, ...]."""
    form = np.asarray(form)
    if form.ndim == fiber_ndim:
        return form
    return np.expand_dims(form, DIM)


def hermitian_form_residual(A: np.ndarray, D: np.ndarray, chart: Chart) -> np.ndarray:
    """L_k D_{i jbar} - sum_a D_{a jbar} A^a_{ki} - sum_abar D_{i abar} conj(A^abar_{k jbar})."""
    dD = _form_derivative(D, chart, 2)
    Dk = _at(D, 2)
    return dD - np.swapaxes(A, -1, -2) @ Dk - Dk @ A.conj()


def skew2_form_residual(A: np.ndarray, d: np.ndarray, chart: Chart) -> np.ndarray:
    """L_k d_ij - sum_a d_aj A^a_ki - sum_a d_ia A^a_kj."""
    dd = _form_derivative(d, chart, 2)
    dk = _at(d, 2)
    return dd - np.swapaxes(A, -1, -2) @ dk - dk @ A


def skew3_form_residual(A: np.ndarray, d: np.ndarray, chart: Chart) -> np.ndarray:
    """L_k d_ijm minus the three connection terms."""
    dd = _form_derivative(d, chart, 3)
    dk = np.asarray(d)
    return (
        dd
        - np.einsum("...ajm,...kai->...kijm", dk, A)
        - np.einsum("...iam,...kaj->...kijm", dk, A)
        - np.einsum("...ija,...kam->...kijm", dk, A)
    )


def concordance_residuals(connections: ConnectionSet, forms: FiberForms, chart: Chart) -> dict[str, float]:
    """Max-norms over interior points of nabla D and nabla d for every gauge bundle."""
    inner = chart.interior()
    u1_D = np.asarray(forms.u1_D, dtype=float)
    du1 = _form_derivative(u1_D, chart, 0)
    u1_res = du1 - _at(u1_D, 0) * (connections.u1 + connections.u1.conj())
    return {
        "u1_hermitian": _max(u1_res[inner]),
        "su2_hermitian": _max(hermitian_form_residual(connections.su2, forms.su2_D, chart)[inner]),
        "su2_skew": _max(skew2_form_residual(connections.su2, forms.su2_d, chart)[inner]),
        "su3_hermitian": _max(hermitian_form_residual(connections.su3, forms.su3_D, chart)[inner]),
        "su3_skew": _max(skew3_form_residual(connections.su3, forms.su3_d, chart)[inner]),
    }


def spinor_form_residual(connections: ConnectionSet, forms: FiberForms, chart: Chart) -> float:
    """nabla_k D_{a abar} for a user-supplied spinor connection."""
    res = hermitian_form_residual(connections.spinor, forms.dirac_D, chart)
    return _max(res[chart.interior()])


@dataclass(frozen=True, eq=False)
class GaugePotentials:
    """Non-vacuum gauge fields in the frame: u1[..., k] real, su2[..., k, a, i], su3[..., k, a, i]."""

    u1: np.ndarray
    su2: np.ndarray
    su3: np.ndarray
    g1: float = 1.0
    g2: float = 1.0
    g3: float = 1.0
    constants: PhysicalConstants = CONSTANTS_PRESETS["natural"][1]

    @classmethod
    def zero(cls, chart: Chart, **kwargs) -> "GaugePotentials":
        g = chart.extents
        return cls(
            np.zeros(g + (DIM,)),
            np.zeros(g + (DIM, 2, 2), complex),
            np.zeros(g + (DIM, 3, 3), complex),
            **kwargs,
        )

    def kappa(self, coupling: float) -> float:
        """e g / (hbar c)."""
        k = self.constants
        return k.e * coupling / (k.hbar * k.c)

    @property
    def kappas(self) -> tuple[float, float, float]:
        return self.kappa(self.g1), self.kappa(self.g2), self.kappa(self.g3)


def compose_gauge(vacuum: ConnectionSet, potentials: GaugePotentials) -> ConnectionSet:
    """A = A[vac] - i (e g / hbar c) CA for each gauge bundle."""
    k1, k2, k3 = potentials.kappas
    return replace(
        vacuum,
        u1=vacuum.u1 - 1j * k1 * potentials.u1,
        su2=vacuum.su2 - 1j * k2 * potentials.su2,
        su3=vacuum.su3 - 1j * k3 * potentials.su3,
    )


def potential_constraint_residuals(potentials: GaugePotentials, forms: FiberForms) -> dict[str, float]:
    """Reality of the U(1) potential and the D-Hermiticity / d-form relations of the others."""
    s2, s3 = potentials.su2, potentials.su3
    D2, d2, D3, d3 = forms.su2_D, forms.su2_d, forms.su3_D, forms.su3_d
    herm2 = np.swapaxes(s2, -1, -2) @ D2 - D2 @ s2.conj()
    skew2 = np.swapaxes(s2, -1, -2) @ d2
    herm3 = np.swapaxes(s3, -1, -2) @ D3 - D3 @ s3.conj()
    skew3 = (
        np.einsum("ajm,...kai->...kijm", d3, s3)
        + np.einsum("iam,...kaj->...kijm", d3, s3)
        + np.einsum("ija,...kam->...kijm", d3, s3)
    )
    return {
        "u1_real": _max(np.imag(potentials.u1)),
        "su2_hermitian": _max(herm2),
        "su2_skew": _max(skew2 - np.swapaxes(skew2, -1, -2)),
        "su3_hermitian": _max(herm3),
        "su3_skew": _max(skew3),
    }


def check_special_unitary(omega: np.ndarray, D: np.ndarray | None = None, tol: float = 1e-10) -> None:
    """Raise if Omega is not D-unitary with unit determinant at some grid point."""
    D = np.eye(omega.shape[-1]) if D is None else D
    # D-unitary: Omega^T D conj(Omega) = D
    unit = np.swapaxes(omega, -1, -2) @ D @ omega.conj() - D
    bad_u = np.abs(unit).reshape(unit.shape[:-2] + (-1,)).max(axis=-1)
    bad_d = np.abs(np.linalg.det(omega) - 1)
    for name, bad in (("unitary", bad_u), ("unit determinant", bad_d)):
        if np.any(bad > tol):
            idx = np.unravel_index(int(np.argmax(bad)), bad.shape)
            raise ValueError(f"Omega is not {name} at grid index {tuple(int(i) for i in idx)} (deviation {bad.max():.3g})")


def gauge_form(omega: np.ndarray, chart: Chart) -> np.ndarray:
    """omega_k = L_k(Omega) Omega^{-1}."""
    return lie_derivatives(omega, chart) @ np.expand_dims(np.linalg.inv(omega), DIM)


def transform_su2_connection(omega: np.ndarray, su2: np.ndarray, chart: Chart) -> np.ndarray:
    om = np.expand_dims(omega, DIM)
    return om @ su2 @ np.linalg.inv(om) - gauge_form(omega, chart)


def su2_gauge_transform(
    omega: np.ndarray,
    higgs: np.ndarray,
    su2: np.ndarray,
    chart: Chart,
    forms: FiberForms | None = None,
    tol: float = 1e-10,
) -> tuple[np.ndarray, np.ndarray]:
    """Return (Omega phi, Omega A Omega^{-1} - omega)."""
    check_special_unitary(omega, None if forms is None else forms.su2_D, tol)
    return np.einsum("...ab,...b->...a", omega, higgs), transform_su2_connection(omega, su2, chart)


def su2_exponential(theta: np.ndarray) -> np.ndarray:
    """exp(i theta . sigma) for a real 3-vector field theta[..., 3]."""
    norm = np.linalg.norm(theta, axis=-1)
    safe = np.where(norm > 0, norm, 1.0)
    unit = theta / safe[..., None]
    gen = np.einsum("...a,aij->...ij", unit, PAULI)
    return np.cos(norm)[..., None, None] * np.eye(2) + 1j * np.sin(norm)[..., None, None] * gen
