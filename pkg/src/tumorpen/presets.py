"""Initial-data presets.

``tumor`` is the physical preset: a disk (ball) tumor with smooth bumps
supported inside it.  ``zero`` and ``rest`` are verification presets: the
all-zero state and a spatially uniform, motionless state on the whole box.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .grid import Grid
from .levelset import signed_distance_sphere
from .state import State

INITIAL_PRESETS = ("tumor", "zero", "rest")


@dataclass(frozen=True)
class InitialData:
    preset: str = "tumor"
    tumor_radius: float = 0.4
    support_radius: Optional[float] = None
    amp_P: float = 1.0
    amp_Q: float = 0.5
    amp_D: float = 0.1
    amp_C: float = 0.8

    @property
    def bump_radius(self) -> float:
        return self.tumor_radius if self.support_radius is None else self.support_radius

    def as_dict(self) -> dict:
        return asdict(self)


def bump(r, radius: float) -> np.ndarray:
    """C2 bump ``(1 - (r/radius)^2)^3`` on ``r < radius``, zero elsewhere."""
    s = np.clip(1.0 - (np.asarray(r) / radius) ** 2, 0.0, None)
    return s**3


def initial_state(data: InitialData, grid: Grid) -> State:
    """Build the t = 0 state (lengths are absolute)."""
    phi = signed_distance_sphere(grid, data.tumor_radius)
    state = State.zeros(grid, phi=phi)
    if data.preset == "zero":
        return state
    if data.preset == "rest":
        ones = np.ones(grid.shape)
        state.P, state.Q, state.D = data.amp_P * ones, data.amp_Q * ones, data.amp_D * ones
        state.C = data.amp_C * ones
        return state
    if data.preset != "tumor":
        raise ValueError(f"unknown initial preset {data.preset!r}")
    b = bump(grid.radius_field, data.bump_radius)
    state.P = data.amp_P * b
    state.Q = data.amp_Q * b
    state.D = data.amp_D * b
    state.C = data.amp_C * b
    return state
