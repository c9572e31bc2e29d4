"""Penalized Forchheimer momentum balance on the collocated grid.

One step of ``m = rho v``::

    rho' v' = rho v + dt * (-div(rho v (x) v) - grad(sigma_delta)
                            + div(mu_w grad v) - (mu_w / K) v' + f_pen(v'))

Convection and the pressure gradient are explicit.  Darcy drag and the
interface penalty are implicit per cell; both are linear in ``v'`` so the
3x3 (2x2) cell system ``(A I + B n n^T) v' = rhs`` is solved in closed form.

The viscous diagonal is implicit with weight ``theta = max(0, 1 - rho/(dt*diag))``,
the smallest weight keeping the update monotone.  Where the density
supports the explicit stencil this is plain explicit viscosity; in vacuum
cells it becomes a local Jacobi relaxation, so ``v`` stays defined on all
of the box without a global solve.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import InstabilityDetected, MomentumInVacuum
from .grid import Grid, gradient, laplacian_diagonal, variable_coeff_laplacian
from .kinetics import total_density
from .levelset import PrescribedMotion, interface_normal, surface_delta
from .penalty import PenaltyParams, coefficient_profile, pressure_sigma_delta
from .transport import check_cfl, flux_divergence


@dataclass(frozen=True)
class PhysicalParams:
    mu: float = 0.1
    nu: float = 0.1
    K_perm: float = 1.0

    def __post_init__(self):
        for name in ("mu", "nu", "K_perm"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


def convective_flux_div(rho, v, grid: Grid) -> np.ndarray:
    """Upwind divergence of ``rho v (x) v``, one component at a time."""
    out = np.empty(grid.vector_shape)
    for i in range(grid.dim):
        out[i] = flux_divergence(rho * v[i], v, grid)
    return out


def recover_velocity(m, rho, rho_floor: float) -> np.ndarray:
    """``v = m / max(rho, rho_floor)``; vacuum cells with negligible momentum get ``v = 0``."""
    if not rho_floor > 0:
        raise ValueError("rho_floor must be positive")
    m_abs = np.sqrt(np.sum(m**2, axis=0))
    if np.any((rho < rho_floor**2) & (m_abs >= rho_floor)):
        raise MomentumInVacuum("non-negligible momentum carried by a vacuum cell")
    v = m / np.maximum(rho, rho_floor)
    vacuum = (rho < rho_floor) & (m_abs < rho_floor)
    return np.where(vacuum, 0.0, v)


def solve_cell_system(rhs, A, B, n) -> np.ndarray:
    """Solve ``(A I + B n n^T) x = rhs`` per cell (Sherman-Morrison)."""
    n_rhs = np.sum(n * rhs, axis=0)
    n2 = np.sum(n * n, axis=0)
    coef = B * n_rhs / (A * (A + B * n2))
    return rhs / A - coef * n


def step_momentum(
    state,
    phys: PhysicalParams,
    params: PenaltyParams,
    motion: PrescribedMotion,
    t: float,
    dt: float,
    grid: Grid,
    rho_new=None,
    phi_new=None,
):
    """Advance momentum from ``t`` to ``t + dt``; returns ``(m', v')``.

    Explicit terms read ``state`` (start of step).  ``rho_new``/``phi_new``
    are the already-updated density and level set; they default to the
    values in ``state``.
    """
    rho = total_density(state.P, state.Q, state.D)
    rho_new = rho if rho_new is None else rho_new
    phi = state.phi if phi_new is None else phi_new
    v = state.v
    w = params.width(grid)
    check_cfl(v, dt, grid)

    sigma = pressure_sigma_delta(state.P, state.Q, state.D, params.m, params.delta, params.beta)
    mu_w = coefficient_profile(phi, phys.mu, params.omega, w, grid)
    diag = laplacian_diagonal(mu_w, grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.clip(1.0 - rho / (dt * diag), 0.0, 1.0)

    rhs = rho * v - dt * (convective_flux_div(rho, v, grid) + gradient(sigma, grid))
    for i in range(grid.dim):
        rhs[i] += dt * (variable_coeff_laplacian(v[i], mu_w, grid) + theta * diag * v[i])

    A = rho_new + dt * (theta * diag + mu_w / phys.K_perm)
    B = dt * surface_delta(phi, w, grid) / params.epsilon
    n = interface_normal(phi, grid)
    V_n = np.sum(motion.on_grid(t + dt, grid) * n, axis=0)
    rhs += B * V_n * n

    v_new = solve_cell_system(rhs, A, B, n)
    if not np.all(np.isfinite(v_new)):
        raise InstabilityDetected("nonfinite velocity after momentum step")
    return rho_new * v_new, v_new
