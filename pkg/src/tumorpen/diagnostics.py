"""Functionals the analysis bounds, evaluated on discrete states."""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np

from .grid import Grid, integrate
from .levelset import PrescribedMotion, interface_normal, surface_delta
from .penalty import PenaltyParams
from .state import State


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float = 0.0
    mass_P: float = 0.0
    mass_Q: float = 0.0
    mass_D: float = 0.0
    mass_C: float = 0.0
    energy_total: float = 0.0
    c_max: float = 0.0
    leakage_P: float = 0.0
    leakage_Q: float = 0.0
    leakage_D: float = 0.0
    leakage_C: float = 0.0
    slip_norm_sq: float = 0.0
    nutrient_budget: float = 0.0
    mass_budget_P: float = 0.0
    mass_budget_Q: float = 0.0
    mass_budget_D: float = 0.0
    # beyond the core set: step size, running time integral of the slip
    # norm, and kinetic energy in the healthy tissue
    dt: float = 0.0
    slip_integral: float = 0.0
    kinetic_exterior: float = 0.0

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def values(self) -> tuple:
        return astuple(self)


def energy_components(state: State, params: PenaltyParams) -> tuple[float, float, float]:
    """(pressure potential, artificial-pressure potential, kinetic) integrals."""
    grid = state.grid
    m, beta = params.m, params.beta
    P, Q, D = state.P, state.Q, state.D
    internal = integrate(P**m + Q**m + D**m, grid) / (m - 1.0)
    artificial = 0.0
    if params.delta:
        artificial = params.delta / (beta - 1.0) * integrate(P**beta + Q**beta + D**beta, grid)
    kinetic = 0.5 * integrate(state.rho * np.sum(state.v**2, axis=0), grid)
    return internal, artificial, kinetic


def total_energy(state: State, params: PenaltyParams) -> float:
    return float(sum(energy_components(state, params)))


def leakage_weight(phi, w: float) -> np.ndarray:
    """Discrete ``[min(phi/w, 1)]^+``: 0 inside the tumor, 1 beyond the band."""
    return np.clip(phi / w, 0.0, 1.0)


def leakage(Z, phi, w: float, grid: Grid) -> float:
    return integrate(Z * leakage_weight(phi, w), grid)


def slip_norm_sq(v, motion: PrescribedMotion, t: float, phi, w: float, grid: Grid) -> float:
    """Smeared ``int_Gamma ((v - V).n)^2 dS``."""
    n = interface_normal(phi, grid)
    slip = np.sum((v - motion.on_grid(t, grid)) * n, axis=0)
    return integrate(slip**2 * surface_delta(phi, w, grid), grid)


def mass_budget_residual(Z_old, Z_new, G_applied, dt: float, grid: Grid) -> float:
    return abs(integrate(Z_new, grid) - integrate(Z_old, grid) - dt * integrate(G_applied, grid))


def exterior_kinetic(state: State) -> float:
    """``int_{phi > 0} rho |v|^2``."""
    outside = state.phi > 0
    return integrate(np.where(outside, state.rho * np.sum(state.v**2, axis=0), 0.0), state.grid)


def record(
    state: State,
    params: PenaltyParams,
    motion: PrescribedMotion,
    *,
    dt: float = 0.0,
    nutrient_budget: float = 0.0,
    mass_budgets=(0.0, 0.0, 0.0),
    slip_integral: float = 0.0,
) -> DiagnosticsRecord:
    grid = state.grid
    w = params.width(grid)
    return DiagnosticsRecord(
        t=float(state.t),
        mass_P=integrate(state.P, grid),
        mass_Q=integrate(state.Q, grid),
        mass_D=integrate(state.D, grid),
        mass_C=integrate(state.C, grid),
        energy_total=total_energy(state, params),
        c_max=float(np.max(state.C)),
        leakage_P=leakage(state.P, state.phi, w, grid),
        leakage_Q=leakage(state.Q, state.phi, w, grid),
        leakage_D=leakage(state.D, state.phi, w, grid),
        leakage_C=leakage(state.C, state.phi, w, grid),
        slip_norm_sq=slip_norm_sq(state.v, motion, state.t, state.phi, w, grid),
        nutrient_budget=float(nutrient_budget),
        mass_budget_P=float(mass_budgets[0]),
        mass_budget_Q=float(mass_budgets[1]),
        mass_budget_D=float(mass_budgets[2]),
        dt=float(dt),
        slip_integral=float(slip_integral),
        kinetic_exterior=exterior_kinetic(state),
    )
