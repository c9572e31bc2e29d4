"""Level-set tracking of the tumor boundary under a prescribed motion.

Sign convention: ``phi < 0`` inside the tumor, ``phi > 0`` in the healthy
tissue.  The boundary motion ``V(t, x)`` is analytic and evaluable anywhere,
so characteristics are traced in closed form rather than from grid data.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import ndimage

from .errors import WidthTooSmall
from .grid import Grid, gradient

GRAD_FLOOR = 1e-8
PLATEAU_FRACTION = 2.0 / 3.0

VelocityFn = Callable[[float, np.ndarray], np.ndarray]


def _smooth_step(s):
    """C-infinity step from 0 (s <= 0) to 1 (s >= 1)."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return a / (a + b)


def cutoff(r, r_support: float, plateau: float = PLATEAU_FRACTION):
    """1 for ``r <= plateau*r_support``, 0 for ``r >= r_support``, smooth between."""
    r_in = plateau * r_support
    return 1.0 - _smooth_step((np.asarray(r, dtype=float) - r_in) / (r_support - r_in))


@dataclass(frozen=True)
class PrescribedMotion:
    """Closed-form boundary velocity ``V(t, x)`` vanishing for ``|x| > r_support``.

    ``x`` has the component axis first: shape ``(d, ...)``.
    """

    name: str
    velocity: VelocityFn = field(repr=False, compare=False)
    r_support: float = math.inf
    args: tuple = ()

    def __call__(self, t: float, x: np.ndarray) -> np.ndarray:
        return self.velocity(t, np.asarray(x, dtype=float))

    def on_grid(self, t: float, grid: Grid) -> np.ndarray:
        return self(t, grid.coords)

    @property
    def spec(self) -> str:
        if self.name == "static":
            return "static"
        return f"{self.name}(" + ", ".join(repr(float(a)) for a in self.args) + ")"


def static() -> PrescribedMotion:
    return PrescribedMotion("static", lambda t, x: np.zeros_like(x), 0.0, ())


def rotation(rate: float, r_support: float = 1.0) -> PrescribedMotion:
    """Rigid rotation about the origin (about the x3 axis in 3-D) inside the plateau."""

    def velocity(t, x):
        r = np.sqrt(np.sum(x**2, axis=0))
        w = rate * cutoff(r, r_support)
        out = np.zeros_like(x)
        out[0] = -w * x[1]
        out[1] = w * x[0]
        return out

    return PrescribedMotion("rotation", velocity, float(r_support), (float(rate), float(r_support)))


def expansion(rate: float, r_support: float) -> PrescribedMotion:
    """Radial expansion ``V = rate * x`` inside the plateau."""

    def velocity(t, x):
        r = np.sqrt(np.sum(x**2, axis=0))
        return rate * cutoff(r, r_support) * x

    return PrescribedMotion("expansion", velocity, float(r_support), (float(rate), float(r_support)))


def uniform(velocity_vector) -> PrescribedMotion:
    """Spatially constant motion; not compactly supported, for verification only."""
    vec = np.asarray(velocity_vector, dtype=float)

    def velocity(t, x):
        shape = (vec.size,) + (1,) * (x.ndim - 1)
        return np.broadcast_to(vec.reshape(shape), x.shape).copy()

    return PrescribedMotion("uniform", velocity, math.inf, tuple(vec))


_PRESET_RE = re.compile(r"^\s*(\w+)\s*(?:\(([^)]*)\))?\s*$")
_PRESETS = {"static": static, "rotation": rotation, "expansion": expansion}


def parse_motion(text: str) -> PrescribedMotion:
    """Parse ``static``, ``rotation(rate[, r_support])`` or ``expansion(rate, r_support)``."""
    m = _PRESET_RE.match(text)
    if not m or m.group(1) not in _PRESETS:
        raise ValueError(f"unknown motion preset {text!r}")
    name, arg_text = m.group(1), m.group(2)
    args = [float(a) for a in arg_text.split(",")] if arg_text and arg_text.strip() else []
    try:
        return _PRESETS[name](*args)
    except TypeError as exc:
        raise ValueError(f"bad arguments for motion preset {text!r}") from exc


def flow_map(motion: PrescribedMotion, x0, t0: float, t1: float, steps: int) -> np.ndarray:
    """Classical RK4 integration of ``dX/dt = V(t, X)`` from ``t0`` to ``t1``."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if t1 < t0:
        raise ValueError("t1 must be >= t0")
    x = np.array(x0, dtype=float)
    dt = (t1 - t0) / steps
    t = t0
    for _ in range(steps):
        k1 = motion(t, x)
        k2 = motion(t + 0.5 * dt, x + 0.5 * dt * k1)
        k3 = motion(t + 0.5 * dt, x + 0.5 * dt * k2)
        k4 = motion(t + dt, x + dt * k3)
        x = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
    return x


def interpolate(f: np.ndarray, points: np.ndarray, grid: Grid) -> np.ndarray:
    """Multilinear interpolation of cell data at physical ``points`` (shape ``(d, ...)``).

    Points outside the cell-center hull take the nearest edge value.
    """
    idx = (points + grid.half_width) / grid.h - 0.5
    return ndimage.map_coordinates(f, idx, order=1, mode="nearest")


def advect_levelset(
    phi: np.ndarray, motion: PrescribedMotion, t: float, dt: float, grid: Grid
) -> np.ndarray:
    """One semi-Lagrangian step of ``phi_t + V . grad(phi) = 0`` from ``t`` to ``t + dt``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if motion.name == "static":
        return phi.copy()
    x = grid.coords
    x_half = x - 0.5 * dt * motion(t + dt, x)
    foot = x - dt * motion(t + 0.5 * dt, x_half)
    return interpolate(phi, foot, grid)


def interface_normal(phi: np.ndarray, grid: Grid, g_floor: float = GRAD_FLOOR) -> np.ndarray:
    """Outward unit normal ``grad(phi)/|grad(phi)|``; zero where phi is flat."""
    g = gradient(phi, grid)
    mag = np.sqrt(np.sum(g**2, axis=0))
    return g / np.maximum(mag, g_floor)


def _check_width(w: float, grid: Grid) -> None:
    if w < 1.5 * grid.h * (1.0 - 1e-12):
        raise WidthTooSmall(f"smoothing width {w} is below 1.5 h = {1.5 * grid.h}")


def cosine_delta(s, w: float):
    """``(1 + cos(pi s / w)) / (2 w)`` on ``|s| <= w``, zero outside; unit mass."""
    s = np.asarray(s, dtype=float)
    return np.where(np.abs(s) <= w, (1.0 + np.cos(np.pi * s / w)) / (2.0 * w), 0.0)


def cosine_heaviside(s, w: float):
    """Antiderivative of ``cosine_delta``: 0 below ``-w``, 1 above ``w``."""
    s = np.asarray(s, dtype=float)
    inner = 0.5 * (1.0 + s / w + np.sin(np.pi * s / w) / np.pi)
    return np.where(s <= -w, 0.0, np.where(s >= w, 1.0, inner))


def surface_delta(phi: np.ndarray, w: float, grid: Grid) -> np.ndarray:
    """Volumetric surface measure ``delta_w(phi) |grad(phi)|``."""
    _check_width(w, grid)
    g = gradient(phi, grid)
    return cosine_delta(phi, w) * np.sqrt(np.sum(g**2, axis=0))


def inside_indicator(phi: np.ndarray, w: float, grid: Grid) -> np.ndarray:
    _check_width(w, grid)
    return cosine_heaviside(-phi, w)


def outside_indicator(phi: np.ndarray, w: float, grid: Grid) -> np.ndarray:
    _check_width(w, grid)
    return cosine_heaviside(phi, w)


def signed_distance_sphere(grid: Grid, radius: float, center=None) -> np.ndarray:
    c = np.zeros(grid.dim) if center is None else np.asarray(center, dtype=float)
    r = np.sqrt(np.sum((grid.coords - c.reshape((-1,) + (1,) * grid.dim)) ** 2, axis=0))
    return r - radius


def min_band_gradient(phi: np.ndarray, grid: Grid, cells: int = 3) -> float:
    """Smallest ``|grad(phi)|`` within ``cells`` cells of the zero set."""
    band = np.abs(phi) <= cells * grid.h
    if not np.any(band):
        return math.inf
    g = gradient(phi, grid)
    return float(np.min(np.sqrt(np.sum(g**2, axis=0))[band]))


def reinitialize(phi: np.ndarray, grid: Grid, iterations: int = 20, cfl: float = 0.5) -> np.ndarray:
    """Relax ``phi`` toward a signed distance with a Godunov upwind sweep.

    Optional: transport does not call this.  The zero set moves by O(h).
    """
    h = grid.h
    sign = phi / np.sqrt(phi**2 + h**2)
    dtau = cfl * h
    out = phi.copy()
    for _ in range(iterations):
        grad2_pos = np.zeros(grid.shape)
        grad2_neg = np.zeros(grid.shape)
        for k in range(grid.dim):
            padded = np.pad(out, [(1, 1) if j == k else (0, 0) for j in range(grid.dim)], mode="edge")
            pm = np.moveaxis(padded, k, 0)
            back = np.moveaxis((pm[1:-1] - pm[:-2]) / h, 0, k)
            fwd = np.moveaxis((pm[2:] - pm[1:-1]) / h, 0, k)
            grad2_pos += np.maximum(np.maximum(back, 0) ** 2, np.minimum(fwd, 0) ** 2)
            grad2_neg += np.maximum(np.minimum(back, 0) ** 2, np.maximum(fwd, 0) ** 2)
        grad = np.where(sign > 0, np.sqrt(grad2_pos), np.sqrt(grad2_neg))
        out = out - dtau * sign * (grad - 1.0)
    return out
