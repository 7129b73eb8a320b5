"""Seeded smooth random fields on a chart, for verification runs."""
from __future__ import annotations

import numpy as np

from .bundles import gamma_algebra
from .connections import su2_exponential
from .manifold import DIM, Chart


def smooth_scalar(chart: Chart, rng: np.random.Generator, amplitude: float = 0.1, modes: int = 3) -> np.ndarray:
    """A real sum of ``modes`` plane-wave sines with random wavevectors of size at most 2."""
    x = chart.coords
    out = np.zeros(chart.extents)
    for _ in range(modes):
        k = rng.uniform(-2.0, 2.0, DIM)
        out += rng.uniform(-1.0, 1.0) * np.sin(np.einsum("m,m...->...", k, x) + rng.uniform(0, 2 * np.pi))
    return amplitude * out / modes


def smooth_real(chart: Chart, rng: np.random.Generator, shape: tuple[int, ...], amplitude: float = 0.1, modes: int = 3) -> np.ndarray:
    """Independent smooth scalars stacked into trailing axes of ``shape``."""
    n = int(np.prod(shape, dtype=int))
    comps = [smooth_scalar(chart, rng, amplitude, modes) for _ in range(n)]
    return np.stack(comps, axis=-1).reshape(chart.extents + shape) if n else np.zeros(chart.extents + shape)


def smooth_complex(chart: Chart, rng: np.random.Generator, shape: tuple[int, ...], amplitude: float = 0.1, modes: int = 3) -> np.ndarray:
    return smooth_real(chart, rng, shape, amplitude, modes) + 1j * smooth_real(chart, rng, shape, amplitude, modes)


def smooth_covector(chart: Chart, rng: np.random.Generator, amplitude: float = 0.1, modes: int = 3) -> np.ndarray:
    return smooth_real(chart, rng, (DIM,), amplitude, modes)


def smooth_hermitian_traceless(chart: Chart, rng: np.random.Generator, n: int, amplitude: float = 0.1, modes: int = 3) -> np.ndarray:
    """A covector field [..., k, n, n] of Hermitian traceless matrices."""
    M = smooth_complex(chart, rng, (DIM, n, n), amplitude, modes)
    H = (M + np.conj(np.swapaxes(M, -1, -2))) / 2
    return H - np.trace(H, axis1=-2, axis2=-1)[..., None, None] * np.eye(n) / n


def smooth_su2_gauge(chart: Chart, rng: np.random.Generator, amplitude: float = 0.3, modes: int = 3) -> np.ndarray:
    """A unitary unit-determinant field exp(i theta . sigma) with smooth theta."""
    return su2_exponential(smooth_real(chart, rng, (3,), amplitude, modes))


def smooth_spinor(
    chart: Chart,
    rng: np.random.Generator,
    extra: tuple[int, ...] = (),
    amplitude: float = 0.1,
    modes: int = 3,
    chirality: str | None = None,
) -> np.ndarray:
    """A Dirac field [..., 4, *extra], optionally projected to 'chiral' or 'antichiral'."""
    psi = smooth_complex(chart, rng, (4,) + extra, amplitude, modes)
    if chirality is None:
        return psi
    alg = gamma_algebra()
    proj = {"chiral": alg.Hdot, "antichiral": alg.Hcirc}[chirality]
    axis = len(chart.extents)
    return np.moveaxis(np.moveaxis(psi, axis, -1) @ proj.T, -1, axis)


def interior_bump(chart: Chart, inset: float = 0.15) -> np.ndarray:
    """A smooth product of sin^4 bumps vanishing within ``inset`` (fraction of each side) of the boundary."""
    out = np.ones(chart.extents)
    for m, (o, h, n) in enumerate(zip(chart.origin, chart.spacing, chart.extents)):
        u = (chart.coords[m] - o) / (h * (n - 1))
        inside = (u > inset) & (u < 1 - inset)
        out *= np.where(inside, np.sin(np.pi * (u - inset) / (1 - 2 * inset)) ** 4, 0.0)
    return out
