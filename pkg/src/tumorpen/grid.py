"""Uniform Cartesian grid over the reference box and the shared stencils.

Scalar fields are numpy arrays of shape ``grid.shape``; vector fields carry
a leading component axis, shape ``(d, *grid.shape)``.  Axis ``k`` of a
scalar array is the ``x_k`` direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidDimension, InvalidResolution, NegativeCoefficient

MIN_CELLS = 8


@dataclass(frozen=True)
class Grid:
    """Cell-centered grid on the box ``[-2R, 2R]^d``."""

    dim: int
    n: int
    radius: float

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise InvalidDimension(f"dimension must be 2 or 3, got {self.dim}")
        if self.n < MIN_CELLS:
            raise InvalidResolution(f"need at least {MIN_CELLS} cells per axis, got {self.n}")
        if not self.radius > 0:
            raise InvalidResolution(f"radius must be positive, got {self.radius}")

    @property
    def half_width(self) -> float:
        return 2.0 * self.radius

    @property
    def h(self) -> float:
        return 4.0 * self.radius / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def vector_shape(self) -> tuple[int, ...]:
        return (self.dim,) + self.shape

    @property
    def cell_count(self) -> int:
        return self.n**self.dim

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    @cached_property
    def centers(self) -> np.ndarray:
        """1-D cell-center coordinates, identical on every axis."""
        return -self.half_width + (np.arange(self.n) + 0.5) * self.h

    @cached_property
    def coords(self) -> np.ndarray:
        """Cell-center positions, shape ``(d, *shape)``."""
        mesh = np.meshgrid(*([self.centers] * self.dim), indexing="ij")
        return np.stack(mesh)

    @cached_property
    def radius_field(self) -> np.ndarray:
        return np.sqrt(np.sum(self.coords**2, axis=0))

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def zeros_vector(self) -> np.ndarray:
        return np.zeros(self.vector_shape)


def make_grid(R: float, N: int, d: int = 2) -> Grid:
    return Grid(dim=int(d), n=int(N), radius=float(R))


def integrate(f: np.ndarray, grid: Grid) -> float:
    """Midpoint-rule integral over the box."""
    return float(np.sum(f) * grid.cell_volume)


def gradient(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Centered differences inside, first-order one-sided on the outer layer."""
    return np.stack(np.gradient(f, grid.h, edge_order=1))


def divergence(u: np.ndarray, grid: Grid) -> np.ndarray:
    out = np.zeros(grid.shape)
    for k in range(grid.dim):
        out += np.gradient(u[k], grid.h, axis=k, edge_order=1)
    return out


def _move(a: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(a, axis, 0)


def face_coefficients(a: np.ndarray, axis: int) -> np.ndarray:
    """Harmonic-mean coefficients on the ``N+1`` faces normal to ``axis``.

    Boundary faces take the adjacent cell value (the ghost copies it).
    """
    am = _move(a, axis)
    left, right = am[:-1], am[1:]
    s = left + right
    with np.errstate(invalid="ignore", divide="ignore"):
        inner = np.where(s > 0, 2.0 * left * right / np.where(s > 0, s, 1.0), 0.0)
    faces = np.concatenate([am[:1], inner, am[-1:]], axis=0)
    return np.moveaxis(faces, 0, axis)


def face_jumps(f: np.ndarray, axis: int) -> np.ndarray:
    """Differences across the ``N+1`` faces with the odd ghost ``f_ghost = -f``."""
    fm = _move(f, axis)
    faces = np.concatenate([2.0 * fm[:1], fm[1:] - fm[:-1], -2.0 * fm[-1:]], axis=0)
    return np.moveaxis(faces, 0, axis)


def _check_coefficient(a: np.ndarray) -> None:
    if np.any(a < 0):
        raise NegativeCoefficient("diffusion coefficient must be nonnegative")


def variable_coeff_laplacian(
    f: np.ndarray, a: np.ndarray, grid: Grid, boundary: str = "dirichlet0"
) -> np.ndarray:
    """Conservative ``div(a grad f)`` with ``f = 0`` imposed on the box boundary."""
    if boundary != "dirichlet0":
        raise ValueError(f"unsupported boundary condition {boundary!r}")
    a = np.broadcast_to(np.asarray(a, dtype=float), grid.shape)
    _check_coefficient(a)
    out = np.zeros(grid.shape)
    inv_h2 = 1.0 / grid.h**2
    for k in range(grid.dim):
        flux = face_coefficients(a, k) * face_jumps(f, k)
        fm = _move(flux, k)
        out += np.moveaxis(fm[1:] - fm[:-1], 0, k) * inv_h2
    return out


def laplacian_diagonal(a: np.ndarray, grid: Grid) -> np.ndarray:
    """Magnitude of the diagonal of ``variable_coeff_laplacian`` per cell.

    Boundary faces count twice because the odd ghost doubles the jump.
    """
    a = np.broadcast_to(np.asarray(a, dtype=float), grid.shape)
    _check_coefficient(a)
    diag = np.zeros(grid.shape)
    for k in range(grid.dim):
        c = _move(face_coefficients(a, k), k).copy()
        c[0] *= 2.0
        c[-1] *= 2.0
        diag += np.moveaxis(c[1:] + c[:-1], 0, k)
    return diag / grid.h**2


def dirichlet_energy(f: np.ndarray, a: np.ndarray, grid: Grid) -> float:
    """Discrete ``int a |grad f|^2`` paired with ``variable_coeff_laplacian``.

    Satisfies ``integrate(f * L f) == -dirichlet_energy(f, a)`` exactly
    (summation by parts); boundary half-faces carry weight 1/2.
    """
    a = np.broadcast_to(np.asarray(a, dtype=float), grid.shape)
    total = 0.0
    for k in range(grid.dim):
        e = _move(face_coefficients(a, k) * face_jumps(f, k) ** 2, k)
        total += float(np.sum(e[1:-1]) + 0.5 * (np.sum(e[0]) + np.sum(e[-1])))
    return total * grid.cell_volume / grid.h**2


def all_finite(*fields: np.ndarray) -> bool:
    return all(bool(np.all(np.isfinite(f))) for f in fields)
