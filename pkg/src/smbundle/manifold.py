"""Discretized space-time chart, frame fields and finite-difference calculus.

Every field on a chart is a numpy array whose first four axes run over the
grid points; any further axes carry fiber or tangent components.  Tangent
indices are always frame indices (components with respect to the vector
fields Upsilon_k stored in ``Chart.frame``).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

DIM = 4
ETA = np.diag([1.0, -1.0, -1.0, -1.0])

GridFunction = Callable[[np.ndarray], np.ndarray]


class ChartError(ValueError):
    """Raised when a chart violates signature or frame invertibility."""


@dataclass(frozen=True, eq=False)
class Chart:
    """A box-shaped coordinate patch sampled on a regular grid.

    ``metric[..., mu, nu]`` holds the coordinate components g_{mu nu} and
    ``frame[..., mu, k]`` the coordinate components e^mu_k of the frame
    vector field Upsilon_k.
    """

    spacing: tuple[float, float, float, float]
    origin: tuple[float, float, float, float]
    metric: np.ndarray
    frame: np.ndarray

    @property
    def extents(self) -> tuple[int, ...]:
        return self.metric.shape[:DIM]

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @cached_property
    def coords(self) -> np.ndarray:
        """Coordinates x^mu of every grid point, shape (4, *extents)."""
        axes = [o + h * np.arange(n) for o, h, n in zip(self.origin, self.spacing, self.extents)]
        return np.stack(np.meshgrid(*axes, indexing="ij"))

    @cached_property
    def frame_inverse(self) -> np.ndarray:
        """Dual coframe components, ``[..., k, mu]``."""
        return np.linalg.inv(self.frame)

    @cached_property
    def frame_metric(self) -> np.ndarray:
        """Metric components g_ij in the frame."""
        return np.einsum("...mi,...mn,...nj->...ij", self.frame, self.metric, self.frame)

    @cached_property
    def inverse_metric(self) -> np.ndarray:
        """Inverse frame metric g^ij by pointwise 4x4 inversion."""
        return np.linalg.inv(self.frame_metric)

    @cached_property
    def volume_density(self) -> np.ndarray:
        """sqrt(-det g) of the coordinate metric."""
        return np.sqrt(-np.linalg.det(self.metric))

    def interior(self, margin: int = 1) -> tuple[slice, ...]:
        """Index expression selecting grid points at least ``margin`` away from the boundary."""
        return tuple(slice(margin, n - margin) for n in self.extents)

    @property
    def interior_volume(self) -> float:
        return float(np.prod([n - 2 for n in self.extents])) * self.cell_volume

    @cached_property
    def structure(self) -> "StructureConstants":
        return structure_constants(self)

    @cached_property
    def christoffel(self) -> np.ndarray:
        """Levi-Civita symbols Gamma[..., h, i, j] of the frame."""
        return levi_civita(self, self.structure)

    @property
    def h(self) -> float:
        """Largest grid step; the scale used by discretization tolerances."""
        return max(self.spacing)


def _flat_metric(coords: np.ndarray) -> np.ndarray:
    return np.broadcast_to(ETA, coords.shape[1:] + (DIM, DIM)).copy()


def _identity_frame(coords: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.eye(DIM), coords.shape[1:] + (DIM, DIM)).copy()


def conformal_factor(coords: np.ndarray) -> np.ndarray:
    """Conformal factor exp(0.1 x^1) used by the curved demonstration chart."""
    return np.exp(0.1 * coords[1])


def _conformal_metric(coords: np.ndarray) -> np.ndarray:
    return conformal_factor(coords)[..., None, None] * ETA


def _conformal_frame(coords: np.ndarray) -> np.ndarray:
    # orthonormal for g = Omega * eta, hence non-holonomic wherever Omega varies
    return conformal_factor(coords)[..., None, None] ** -0.5 * np.eye(DIM)


def _rotating_frame(coords: np.ndarray) -> np.ndarray:
    theta = 0.3 * coords[0] + 0.2 * coords[1]
    frame = _identity_frame(coords)
    cos, sin = np.cos(theta), np.sin(theta)
    frame[..., 2, 2], frame[..., 2, 3] = cos, -sin
    frame[..., 3, 2], frame[..., 3, 3] = sin, cos
    return frame


CHART_PRESETS: dict[str, tuple[str, GridFunction, GridFunction]] = {
    "minkowski-coordinate": (
        "flat metric diag(1,-1,-1,-1) with the coordinate frame",
        _flat_metric,
        _identity_frame,
    ),
    "curved-demo": (
        "conformally flat metric exp(0.1 x1)*eta with its orthonormal, non-coordinate frame",
        _conformal_metric,
        _conformal_frame,
    ),
    "rotating-frame": (
        "flat metric with an orthonormal frame rotating in the x2-x3 plane",
        _flat_metric,
        _rotating_frame,
    ),
}


def _as_quad(value: float | Sequence[float], name: str) -> tuple[float, ...]:
    quad = tuple(float(v) for v in np.broadcast_to(np.asarray(value, dtype=float), (DIM,)))
    if len(quad) != DIM:
        raise ChartError(f"{name} needs {DIM} entries")
    return quad


def build_chart(
    preset: str | None = "minkowski-coordinate",
    *,
    extents: int | Sequence[int] = 9,
    spacing: float | Sequence[float] = 0.1,
    origin: float | Sequence[float] = 0.0,
    metric: GridFunction | None = None,
    frame: GridFunction | None = None,
) -> Chart:
    """Sample a chart from a named preset or from explicit metric/frame functions.

    Explicit ``metric`` and ``frame`` callables receive the coordinate array of
    shape (4, *extents) and return arrays of shape (*extents, 4, 4).  They
    override the corresponding part of the preset.
    """
    ext = tuple(int(n) for n in np.broadcast_to(np.asarray(extents), (DIM,)))
    if any(n < 5 for n in ext):
        raise ChartError(f"every axis needs at least 5 grid points, got {ext}")
    steps = _as_quad(spacing, "spacing")
    if any(h <= 0 for h in steps):
        raise ChartError(f"spacing must be positive, got {steps}")
    start = _as_quad(origin, "origin")

    if preset is not None:
        if preset not in CHART_PRESETS:
            raise ChartError(f"unknown chart preset {preset!r}; known: {sorted(CHART_PRESETS)}")
        _, preset_metric, preset_frame = CHART_PRESETS[preset]
        metric = metric or preset_metric
        frame = frame or preset_frame
    if metric is None or frame is None:
        raise ChartError("either a preset or both metric and frame functions are required")

    probe = Chart(steps, start, np.zeros(ext + (DIM, DIM)), np.zeros(ext + (DIM, DIM)))
    coords = probe.coords
    g = np.asarray(metric(coords), dtype=float)
    e = np.asarray(frame(coords), dtype=float)
    _validate(g, e, coords)
    chart = Chart(steps, start, g, e)
    chart.__dict__["coords"] = coords
    return chart


def _validate(g: np.ndarray, e: np.ndarray, coords: np.ndarray) -> None:
    def where(flat_index: int) -> str:
        idx = np.unravel_index(flat_index, coords.shape[1:])
        x = coords[(slice(None),) + idx]
        return f"grid index {tuple(int(i) for i in idx)} (x = {np.round(x, 6).tolist()})"

    if not np.allclose(g, np.swapaxes(g, -1, -2), atol=1e-12):
        bad = np.abs(g - np.swapaxes(g, -1, -2)).reshape(-1, DIM * DIM).max(axis=1).argmax()
        raise ChartError(f"metric is not symmetric at {where(bad)}")
    eig = np.linalg.eigvalsh(g).reshape(-1, DIM)
    positive = (eig > 0).sum(axis=1)
    negative = (eig < 0).sum(axis=1)
    bad = np.flatnonzero((positive != 1) | (negative != 3))
    if bad.size:
        raise ChartError(f"metric signature is not (+,-,-,-) at {where(bad[0])}")
    det = np.linalg.det(e).reshape(-1)
    scale = np.abs(e).reshape(-1, DIM * DIM).max(axis=1) ** DIM
    bad = np.flatnonzero(np.abs(det) <= 1e-12 * np.maximum(scale, 1e-300))
    if bad.size:
        raise ChartError(f"frame matrix is singular at {where(bad[0])}")


def coordinate_gradient(f: np.ndarray, chart: Chart) -> np.ndarray:
    """Partial derivatives d_mu f, inserted as a new axis right after the grid axes.

    Central second-order differences inside, first-order one-sided at the edges.
    """
    parts = [np.gradient(f, chart.spacing[mu], axis=mu, edge_order=1) for mu in range(DIM)]
    return np.stack(parts, axis=DIM)


def lie_derivatives(f: np.ndarray, chart: Chart) -> np.ndarray:
    """L_{Upsilon_k} f for all k; the new frame axis sits right after the grid axes."""
    grad = coordinate_gradient(f, chart)
    comps = grad.shape[DIM + 1 :]
    flat = grad.reshape(chart.extents + (DIM, -1))
    out = np.einsum("...mk,...mn->...kn", chart.frame, flat)
    return out.reshape(chart.extents + (DIM,) + comps)


def lie_derivative(f: np.ndarray, k: int, chart: Chart) -> np.ndarray:
    """Directional derivative of every component of ``f`` along Upsilon_k."""
    if k not in range(DIM):
        raise ValueError(f"frame index must be in 0..3, got {k}")
    return lie_derivatives(f, chart)[(slice(None),) * DIM + (k,)]


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """c[..., k, i, j] with [Upsilon_i, Upsilon_j] = sum_k c^k_ij Upsilon_k."""

    c: np.ndarray


def structure_constants(chart: Chart) -> StructureConstants:
    # de[..., k, mu, j] = L_k e^mu_j
    de = lie_derivatives(chart.frame, chart)
    commutator = np.einsum("...imj->...mij", de) - np.einsum("...jmi->...mij", de)
    c = np.einsum("...km,...mij->...kij", chart.frame_inverse, commutator)
    return StructureConstants(c)


def levi_civita(chart: Chart, structure: StructureConstants | None = None) -> np.ndarray:
    """Levi-Civita symbols Gamma[..., h, i, j] in the frame, nabla_i Upsilon_j = Gamma^h_ij Upsilon_h.

    Koszul formula for a non-holonomic frame:
    2 Gamma_lij = L_i g_jl + L_j g_il - L_l g_ij + c_lij - c_jil - c_ijl
    with c_lij = g_lh c^h_ij (first index lowered).
    """
    c = (structure or structure_constants(chart)).c
    g = chart.frame_metric
    dg = lie_derivatives(g, chart)  # [..., k, i, j] = L_k g_ij
    c_low = np.einsum("...lh,...hij->...lij", g, c)
    koszul = (
        np.einsum("...ijl->...lij", dg)
        + np.einsum("...jil->...lij", dg)
        - dg
        + c_low
        - np.einsum("...jil->...lij", c_low)
        - np.einsum("...ijl->...lij", c_low)
    )
    return 0.5 * np.einsum("...hl,...lij->...hij", chart.inverse_metric, koszul)


def torsion_residual(gamma: np.ndarray, structure: StructureConstants) -> np.ndarray:
    return gamma - np.swapaxes(gamma, -1, -2) - structure.c


def metricity_residual(gamma: np.ndarray, chart: Chart) -> np.ndarray:
    """nabla_k g_ij = L_k g_ij - Gamma^h_ki g_hj - Gamma^h_kj g_ih."""
    g = chart.frame_metric
    dg = lie_derivatives(g, chart)
    term = np.einsum("...hki,...hj->...kij", gamma, g)
    return dg - term - np.swapaxes(term, -1, -2)


def integrate(f: np.ndarray, chart: Chart) -> complex | float:
    """Riemann sum of f * sqrt(-det g) * cell volume over interior grid points."""
    f = np.asarray(f)
    if f.shape != chart.extents:
        raise ValueError(f"integrand shape {f.shape} does not match chart {chart.extents}")
    inner = chart.interior()
    total = np.sum(f[inner] * chart.volume_density[inner]) * chart.cell_volume
    return total.item()
