"""Fiber index spaces, their basic forms, and the Dirac gamma algebra."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np


class BundleKind(enum.Enum):
    DIRAC = "dirac"
    U1 = "u1"
    SU2 = "su2"
    SU3 = "su3"
    TANGENT = "tangent"

    @property
    def dim(self) -> int:
        return {"dirac": 4, "u1": 1, "su2": 2, "su3": 3, "tangent": 4}[self.value]


class Chirality(enum.Enum):
    CHIRAL = "chiral"
    ANTICHIRAL = "antichiral"
    NONE = "none"


ALLOWED_WEIGHTS = frozenset({3, -3, -6, 1, 4, -2, 0})


@dataclass(frozen=True)
class SpeciesDescriptor:
    """Transformation law of a field species.

    ``slots`` lists the fiber slots in storage order (a subset of Dirac, SU2,
    SU3, always in that order).  ``weight`` is the number of upper minus lower
    U(1) indices, i.e. the multiple of the U(1) connection in the covariant
    derivative.
    """

    name: str
    slots: tuple[BundleKind, ...]
    weight: int
    chirality: Chirality = Chirality.NONE

    def __post_init__(self) -> None:
        order = [BundleKind.DIRAC, BundleKind.SU2, BundleKind.SU3]
        if list(self.slots) != [k for k in order if k in self.slots]:
            raise ValueError(f"slots of {self.name} must be ordered Dirac, SU2, SU3")
        if self.weight not in ALLOWED_WEIGHTS:
            raise ValueError(f"hypercharge weight {self.weight} of {self.name} is not a known species weight")

    @property
    def fiber_shape(self) -> tuple[int, ...]:
        return tuple(k.dim for k in self.slots)

    def slot_axis(self, kind: BundleKind) -> int | None:
        """Position of ``kind`` among the fiber axes, or None."""
        return self.slots.index(kind) if kind in self.slots else None


D, S2, S3 = BundleKind.DIRAC, BundleKind.SU2, BundleKind.SU3
HIGGS = SpeciesDescriptor("higgs", (S2,), 3)
DUAL_HIGGS = SpeciesDescriptor("dual-higgs", (S2,), -3)
LEPTON_DOUBLET = SpeciesDescriptor("lepton-doublet", (D, S2), -3, Chirality.CHIRAL)
LEPTON_SINGLET = SpeciesDescriptor("lepton-singlet", (D,), -6, Chirality.ANTICHIRAL)
CHARGED_LEPTON = SpeciesDescriptor("charged-lepton", (D,), -6)
CHARGED_LEPTON_CHIRAL = SpeciesDescriptor("charged-lepton-chiral", (D,), -6, Chirality.CHIRAL)
NEUTRINO = SpeciesDescriptor("neutrino", (D,), 0, Chirality.CHIRAL)
QUARK_DOUBLET = SpeciesDescriptor("quark-doublet", (D, S2, S3), 1, Chirality.CHIRAL)
UP_SINGLET = SpeciesDescriptor("up-singlet", (D, S3), 4, Chirality.ANTICHIRAL)
DOWN_SINGLET = SpeciesDescriptor("down-singlet", (D, S3), -2, Chirality.ANTICHIRAL)
UP_QUARK = SpeciesDescriptor("up-quark", (D, S3), 4)
DOWN_QUARK = SpeciesDescriptor("down-quark", (D, S3), -2)
UP_QUARK_CHIRAL = SpeciesDescriptor("up-quark-chiral", (D, S3), 4, Chirality.CHIRAL)
DOWN_QUARK_CHIRAL = SpeciesDescriptor("down-quark-chiral", (D, S3), -2, Chirality.CHIRAL)

SPECIES = {
    s.name: s
    for s in (
        HIGGS, DUAL_HIGGS, LEPTON_DOUBLET, LEPTON_SINGLET, CHARGED_LEPTON, CHARGED_LEPTON_CHIRAL,
        NEUTRINO, QUARK_DOUBLET, UP_SINGLET, DOWN_SINGLET, UP_QUARK, DOWN_QUARK,
        UP_QUARK_CHIRAL, DOWN_QUARK_CHIRAL,
    )
}


def levi_civita_array(n: int = 3) -> np.ndarray:
    """Unit totally antisymmetric array with eps[0, 1, ..., n-1] = 1."""
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        eps[perm] = np.linalg.det(np.eye(n)[list(perm)])
    return eps


@dataclass(frozen=True, eq=False)
class FiberForms:
    """Basic Hermitian and skew forms of the Dirac, U(1), SU(2) and SU(3) bundles.

    Lower-index arrays are stored; the upper-index forms are their inverses.
    """

    dirac_D: np.ndarray
    u1_D: float
    su2_D: np.ndarray
    su2_d: np.ndarray
    su3_D: np.ndarray
    su3_d: np.ndarray

    @cached_property
    def su2_d_up(self) -> np.ndarray:
        """d^{ij}, the inverse matrix of d_{ij}."""
        return np.linalg.inv(self.su2_d)

    @cached_property
    def su3_d_up(self) -> np.ndarray:
        """d^{ijk} normalized so that sum_jk d^{ijk} d_{mjk} = 2 delta^i_m."""
        eps = levi_civita_array(3)
        return eps / self.su3_d[0, 1, 2]

    @cached_property
    def su2_D_up(self) -> np.ndarray:
        """D^{q qbar} with sum_pbar D_{p pbar} D^{q pbar} = delta^q_p."""
        return np.linalg.inv(self.su2_D).T

    @cached_property
    def su3_D_up(self) -> np.ndarray:
        return np.linalg.inv(self.su3_D).T

    def check(self, tol: float = 1e-12) -> dict[str, float]:
        """Residuals of the structural invariants; all should be below ``tol``."""
        res = {
            "dirac_hermitian": _herm(self.dirac_D),
            "su2_hermitian": _herm(self.su2_D),
            "su3_hermitian": _herm(self.su3_D),
            "su2_antisymmetric": float(np.abs(self.su2_d + self.su2_d.T).max()),
            "su3_antisymmetric": float(
                max(np.abs(self.su3_d + np.transpose(self.su3_d, p)).max() for p in [(1, 0, 2), (0, 2, 1), (2, 1, 0)])
            ),
        }
        res.update(form_concordance_residuals(self))
        return res

    def validate(self, tol: float = 1e-12) -> None:
        if self.u1_D <= 0:
            raise ValueError("u1_D must be positive")
        for name, mat in (("su2_D", self.su2_D), ("su3_D", self.su3_D)):
            if _herm(mat) > tol or np.linalg.eigvalsh(mat).min() <= 0:
                raise ValueError(f"{name} must be Hermitian positive definite")
        bad = {k: v for k, v in self.check(tol).items() if v > tol}
        if bad:
            raise ValueError(f"fiber forms violate invariants: {bad}")


def _herm(mat: np.ndarray) -> float:
    return float(np.abs(mat - mat.conj().T).max())


def form_concordance_residuals(forms: FiberForms) -> dict[str, float]:
    """Compatibility of the skew forms d with the Hermitian forms D.

    SU(2): sum d^{ij} D_{i ibar} D_{j jbar} = -conj(d_{ibar jbar});
    SU(3): the triple contraction equals +conj(d_{ibar jbar kbar}).
    """
    D2, D3 = forms.su2_D, forms.su3_D
    lhs2 = np.einsum("ij,ia,jb->ab", forms.su2_d_up, D2, D2)
    lhs3 = np.einsum("ijk,ia,jb,kc->abc", forms.su3_d_up, D3, D3, D3)
    return {
        "su2_form_concordance": float(np.abs(lhs2 + forms.su2_d.conj()).max()),
        "su3_form_concordance": float(np.abs(lhs3 - forms.su3_d.conj()).max()),
    }


@dataclass(frozen=True, eq=False)
class GammaAlgebra:
    gamma: np.ndarray  # [q, a, b]
    H: np.ndarray

    @cached_property
    def Hdot(self) -> np.ndarray:
        """Projector onto chiral spinors."""
        return 0.5 * (np.eye(4) + self.H)

    @cached_property
    def Hcirc(self) -> np.ndarray:
        """Projector onto antichiral spinors."""
        return 0.5 * (np.eye(4) - self.H)


def gamma_algebra() -> GammaAlgebra:
    i = 1j
    g0 = [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
    g1 = [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]
    g2 = [[0, 0, 0, i], [0, 0, -i, 0], [0, -i, 0, 0], [i, 0, 0, 0]]
    g3 = [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]
    gamma = np.array([g0, g1, g2, g3], dtype=complex)
    H = np.diag([1, 1, -1, -1]).astype(complex)
    return GammaAlgebra(gamma, H)


def standard_forms() -> FiberForms:
    """The constant forms of the standard orthonormal-frame gauge.

    The Dirac form is gamma^0, the Hermitian form under which every gamma^q
    of ``gamma_algebra`` is self-adjoint.
    """
    return FiberForms(
        dirac_D=gamma_algebra().gamma[0].copy(),
        u1_D=1.0,
        su2_D=np.eye(2, dtype=complex),
        su2_d=np.array([[0, 1], [-1, 0]], dtype=complex),
        su3_D=np.eye(3, dtype=complex),
        su3_d=levi_civita_array(3).astype(complex),
    )


def clifford_residual(algebra: GammaAlgebra) -> float:
    eta = np.diag([1.0, -1.0, -1.0, -1.0])
    g = algebra.gamma
    anti = np.einsum("pab,qbc->pqac", g, g) + np.einsum("qab,pbc->pqac", g, g)
    target = 2 * eta[:, :, None, None] * np.eye(4)
    return float(np.abs(anti - target).max())


def algebra_residuals(algebra: GammaAlgebra) -> dict[str, float]:
    g, H, Hd, Hc = algebra.gamma, algebra.H, algebra.Hdot, algebra.Hcirc
    eye = np.eye(4)
    return {
        "clifford": clifford_residual(algebra),
        "chirality_product": float(np.abs(1j * g[0] @ g[1] @ g[2] @ g[3] - H).max()),
        "chirality_involution": float(np.abs(H @ H - eye).max()),
        "chirality_anticommutes": float(max(np.abs(H @ gq + gq @ H).max() for gq in g)),
        "projector_sum": float(np.abs(Hd + Hc - eye).max()),
        "projector_idempotent": float(max(np.abs(Hd @ Hd - Hd).max(), np.abs(Hc @ Hc - Hc).max())),
        "projector_orthogonal": float(max(np.abs(Hd @ Hc).max(), np.abs(Hc @ Hd).max())),
    }


def dirac_self_adjoint_residual(algebra: GammaAlgebra, forms: FiberForms) -> float:
    """How far D gamma^q is from Hermitian, i.e. gamma^q from D-self-adjoint."""
    prods = np.einsum("ab,qbc->qac", forms.dirac_D, algebra.gamma)
    return float(np.abs(prods - np.conj(np.swapaxes(prods, -1, -2))).max())


def chirality_check(psi: np.ndarray, species: SpeciesDescriptor, algebra: GammaAlgebra | None = None) -> float:
    """Max-norm of the part of ``psi`` that its declared chirality forbids.

    The Dirac slot is located from the species signature; fields are stored
    with grid axes first, so the Dirac axis is counted from the end.
    """
    if species.chirality is Chirality.NONE:
        raise ValueError(f"species {species.name} has no declared chirality")
    axis = species.slot_axis(BundleKind.DIRAC)
    if axis is None:
        raise ValueError(f"species {species.name} carries no Dirac index")
    algebra = algebra or gamma_algebra()
    proj = algebra.Hcirc if species.chirality is Chirality.CHIRAL else algebra.Hdot
    dirac_axis = psi.ndim - len(species.slots) + axis
    moved = np.moveaxis(psi, dirac_axis, -1)
    return float(np.abs(moved @ proj.T).max(initial=0.0))


def project(psi: np.ndarray, chirality: Chirality, dirac_axis: int = -1) -> np.ndarray:
    """Apply Hdot (chiral) or Hcirc (antichiral) along ``dirac_axis``."""
    algebra = gamma_algebra()
    proj = {Chirality.CHIRAL: algebra.Hdot, Chirality.ANTICHIRAL: algebra.Hcirc}[chirality]
    moved = np.moveaxis(psi, dirac_axis, -1)
    return np.moveaxis(moved @ proj.T, -1, dirac_axis)


def raise_su2(t: np.ndarray, forms: FiberForms, axis: int = -1) -> np.ndarray:
    """t^q = sum_k t_k d^{kq} along ``axis``."""
    return np.moveaxis(np.tensordot(np.moveaxis(t, axis, -1), forms.su2_d_up, axes=([-1], [0])), -1, axis)


def lower_su2(t: np.ndarray, forms: FiberForms, axis: int = -1) -> np.ndarray:
    """t_q = sum_k t^k d_{kq} along ``axis``."""
    return np.moveaxis(np.tensordot(np.moveaxis(t, axis, -1), forms.su2_d, axes=([-1], [0])), -1, axis)


# lower(raise(t)) = t * RAISE_LOWER_SIGN for the inverse-matrix convention of d^{ij}
RAISE_LOWER_SIGN = 1
