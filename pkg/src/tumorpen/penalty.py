"""Penalization ingredients: coefficient profiles, artificial pressure, slip force."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import NegativeDensity
from .grid import Grid
from .levelset import PrescribedMotion, inside_indicator, interface_normal, surface_delta

DEFAULT_WIDTH_CELLS = 2.0


@dataclass(frozen=True)
class PenaltyParams:
    """Regularization parameters of the penalized problem.

    ``w`` is the interface smoothing width; ``None`` means two cells of
    whatever grid the parameters are used on.
    """

    epsilon: float = 1e-2
    omega: float = 0.1
    delta: float = 1e-3
    beta: float = 2.0
    m: float = 2.0
    w: Optional[float] = None
    rho_floor: float = 1e-10

    def __post_init__(self):
        if not self.m > 1.5:
            raise ValueError("m > 3/2 required")
        if not self.beta >= 2:
            raise ValueError("beta >= 2 required")
        if not self.epsilon > 0:
            raise ValueError("epsilon > 0 required")
        if not 0 < self.omega <= 1:
            raise ValueError("omega in (0, 1] required")
        if not self.delta >= 0:
            raise ValueError("delta >= 0 required")
        if self.w is not None and not self.w > 0:
            raise ValueError("w > 0 required")
        if not self.rho_floor > 0:
            raise ValueError("rho_floor > 0 required")

    def width(self, grid: Grid) -> float:
        return DEFAULT_WIDTH_CELLS * grid.h if self.w is None else self.w

    def as_dict(self) -> dict:
        return asdict(self)


def coefficient_profile(phi, base: float, omega: float, w: float, grid: Grid) -> np.ndarray:
    """``base`` inside the tumor, ``omega*base`` outside, smooth across the band."""
    if not base > 0:
        raise ValueError("base coefficient must be positive")
    if not 0 < omega <= 1:
        raise ValueError("omega must lie in (0, 1]")
    return base * (omega + (1.0 - omega) * inside_indicator(phi, w, grid))


def _check_nonnegative(*fields):
    for z in fields:
        if np.any(z < 0):
            raise NegativeDensity("pressure needs nonnegative densities")


def pressure_sigma_delta(P, Q, D, m: float, delta: float, beta: float) -> np.ndarray:
    _check_nonnegative(P, Q, D)
    sigma = P**m + Q**m + D**m
    if delta:
        sigma = sigma + delta * (P**beta + Q**beta + D**beta)
    return sigma


def penalty_force(v, motion: PrescribedMotion, t: float, phi, params: PenaltyParams, grid: Grid):
    """Smeared normal-slip force ``-(1/eps) delta_w ((v - V).n) n``."""
    w = params.width(grid)
    n = interface_normal(phi, grid)
    slip = np.sum((v - motion.on_grid(t, grid)) * n, axis=0)
    return -(surface_delta(phi, w, grid) * slip / params.epsilon) * n
