"""Phase-change kinetics of the three cell populations.

Every source is linear in its own species with an affine-in-C rate, so
``G_Z = F_Z(C) * Z``; the transport step integrates that exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import NegativeDensity, NutrientOutOfRange

# relative slack on the nutrient range check; C is only ever produced by
# monotone updates so anything beyond round-off is a solver bug
_RANGE_TOL = 1e-12


@dataclass(frozen=True)
class RateConstants:
    K_B: float = 1.0
    K_Q: float = 0.3
    K_P: float = 0.4
    K_A: float = 0.2
    K_D: float = 0.3
    K_R: float = 0.25
    C_bar: float = 1.0
    K_C: float = 1.0

    def __post_init__(self):
        for name in ("K_B", "K_Q", "K_P", "K_A", "K_D", "K_R"):
            if getattr(self, name) < 0:
                raise ValueError(f"rate {name} must be nonnegative")
        if not self.C_bar > 0:
            raise ValueError("C_bar must be positive")
        if self.K_C != 1.0:
            raise ValueError("K_C is fixed to 1")

    def as_dict(self) -> dict:
        return asdict(self)


def check_inputs(P, Q, D, C, k: RateConstants) -> None:
    for name, z in (("P", P), ("Q", Q), ("D", D)):
        if np.any(z < 0):
            raise NegativeDensity(f"{name} has negative values (min {np.min(z):.3e})")
    upper = k.C_bar * (1.0 + _RANGE_TOL)
    if np.any(C < 0) or np.any(C > upper):
        raise NutrientOutOfRange(
            f"nutrient outside [0, C_bar={k.C_bar}]: range [{np.min(C):.6g}, {np.max(C):.6g}]"
        )


def growth_rates(C, k: RateConstants):
    """Per-species rates ``F_P, F_Q, F_D`` with ``G_Z = F_Z * Z``."""
    deficit = k.C_bar - C
    F_P = k.K_B * C - (k.K_Q + k.K_A) * deficit
    F_Q = -(k.K_P * C + k.K_D * deficit)
    F_D = np.full_like(np.asarray(C, dtype=float), -k.K_R)
    return F_P, F_Q, F_D


def source_terms(P, Q, D, C, k: RateConstants):
    check_inputs(P, Q, D, C, k)
    F_P, F_Q, F_D = growth_rates(C, k)
    return F_P * P, F_Q * Q, F_D * D


def total_density(P, Q, D):
    return P + Q + D


def total_source_expanded(P, Q, D, C, k: RateConstants):
    """Sum of the three sources written out as the total-density source."""
    check_inputs(P, Q, D, C, k)
    return (
        (k.K_A + k.K_B + k.K_Q) * C * P
        - (k.K_A + k.K_Q) * k.C_bar * P
        - k.K_D * k.C_bar * Q
        + (k.K_D - k.K_P) * C * Q
        - k.K_R * D
    )
