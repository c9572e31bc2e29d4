"""Full simulations, limit-passage sweeps and verification studies."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import diagnostics as diag
from .config import RunConfig, config_hash, resolve_param, validate_config
from .errors import InstabilityDetected, MaxPrincipleViolated
from .grid import integrate, make_grid
from .levelset import advect_levelset, min_band_gradient, parse_motion, rotation, signed_distance_sphere
from .momentum import step_momentum
from .nutrient import check_max_principle, nutrient_budget_residual, step_nutrient
from .penalty import PenaltyParams
from .presets import initial_state
from .state import State
from .transport import cfl_timestep, upwind_advect, step_species

logger = logging.getLogger(__name__)

LIMIT_PARAMS = ("epsilon", "omega", "delta")
SWEEP_PARAMS = LIMIT_PARAMS + ("resolution",)
ENERGY_GROWTH_FACTOR = 10.0


@dataclass
class StepInfo:
    dt: float
    nutrient_budget: float
    mass_budgets: tuple
    slip_norm_sq: float


@dataclass
class RunResult:
    records: list
    final_state: State
    config: RunConfig

    @property
    def slip_integral(self) -> float:
        return self.records[-1].slip_integral if self.records else 0.0

    def max_leakage(self, species: str) -> float:
        return max(getattr(r, f"leakage_{species}") for r in self.records)

    def min_mass(self, species: str) -> float:
        return min(getattr(r, f"mass_{species}") for r in self.records)


class Simulation:
    """Deterministic solver for one :class:`RunConfig`.

    Step order: level set, species (transport + kinetics), nutrient,
    momentum.  Every substep reads the start-of-step velocity.
    """

    def __init__(self, config: RunConfig, validate: bool = True):
        if validate:
            validate_config(config)
        self.config = config
        g = config.grid
        self.grid = make_grid(g.R, g.N, g.d)
        self.motion = parse_motion(config.motion)
        self.phys = config.physics
        self.rates = config.kinetics
        self.penalty = config.penalty

    def initial_state(self) -> State:
        state = initial_state(self.config.initial, self.grid)
        return state

    def stable_dt(self, state: State) -> float:
        run = self.config.run
        return cfl_timestep(state.v, self.grid.h, run.cfl, dt_max=run.dt_max)

    def step(self, state: State, dt: float, C0_max: Optional[float] = None) -> tuple[State, StepInfo]:
        grid, t = self.grid, state.t
        phi_new = advect_levelset(state.phi, self.motion, t, dt, grid)
        (P, Q, D), applied = step_species(
            state.P, state.Q, state.D, state.C, state.v, dt, self.rates, grid, return_sources=True
        )
        C = step_nutrient(state.C, phi_new, self.phys.nu, self.penalty, dt, grid)
        m, v = step_momentum(state, self.phys, self.penalty, self.motion, t, dt, grid, rho_new=P + Q + D, phi_new=phi_new)
        new = State(grid=grid, t=t + dt, P=P, Q=Q, D=D, C=C, v=v, m=m, phi=phi_new)

        if not new.is_finite():
            raise InstabilityDetected(f"nonfinite field at t={new.t:.6g}")
        bound = float(np.max(state.C)) if C0_max is None else C0_max
        if not check_max_principle(C, bound, self.rates.C_bar):
            raise MaxPrincipleViolated(
                f"nutrient range [{np.min(C):.6g}, {np.max(C):.6g}] exceeds max(C0, C_bar) at t={new.t:.6g}"
            )
        if min_band_gradient(phi_new, grid) <= 0.0:
            logger.warning("level set is flat near the interface at t=%.4g", new.t)

        info = StepInfo(
            dt=dt,
            nutrient_budget=nutrient_budget_residual(state.C, C, phi_new, self.phys.nu, self.penalty, dt, grid),
            mass_budgets=tuple(
                diag.mass_budget_residual(z0, z1, g, dt, grid)
                for z0, z1, g in zip((state.P, state.Q, state.D), (P, Q, D), applied)
            ),
            slip_norm_sq=diag.slip_norm_sq(v, self.motion, new.t, phi_new, self.penalty.width(grid), grid),
        )
        return new, info

    def run(self, state: Optional[State] = None, t_end: Optional[float] = None) -> RunResult:
        state = self.initial_state() if state is None else state
        t_end = self.config.run.t_end if t_end is None else t_end
        every = self.config.run.output_every
        C0_max = float(np.max(state.C))
        slip_integral = 0.0
        records = [diag.record(state, self.penalty, self.motion)]
        n = 0
        t_stop = t_end * (1.0 - 1e-12)
        while state.t < t_stop:
            dt = min(self.stable_dt(state), t_end - state.t)
            state, info = self.step(state, dt, C0_max=C0_max)
            slip_integral += info.dt * info.slip_norm_sq
            n += 1
            if n % every == 0 or state.t >= t_stop:
                records.append(
                    diag.record(
                        state,
                        self.penalty,
                        self.motion,
                        dt=info.dt,
                        nutrient_budget=info.nutrient_budget,
                        mass_budgets=info.mass_budgets,
                        slip_integral=slip_integral,
                    )
                )
        logger.info("run finished: %d steps to t=%.4g", n, state.t)
        return RunResult(records=records, final_state=state, config=self.config)


def run_simulation(config: RunConfig, state: Optional[State] = None) -> RunResult:
    return Simulation(config).run(state)


def energy_bounded(records, factor: float = ENERGY_GROWTH_FACTOR) -> bool:
    """No-blow-up proxy: ``E(t) <= factor * (1 + E(0))`` along the run."""
    e0 = records[0].energy_total
    return all(r.energy_total <= factor * (1.0 + e0) for r in records)


# --------------------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class SweepSpec:
    param: str
    values: tuple
    base: RunConfig

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise ValueError(f"sweep parameter must be one of {SWEEP_PARAMS}")
        vals = list(self.values)
        if len(vals) < 3:
            raise ValueError("a sweep needs at least 3 values")
        if any(not v > 0 for v in vals):
            raise ValueError("sweep values must be positive")
        steps = np.diff(vals)
        if self.param in LIMIT_PARAMS and not np.all(steps < 0):
            raise ValueError("limit sweeps must be strictly decreasing")
        if self.param == "resolution" and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError("resolution sweeps must be strictly monotone")


SWEEP_METRICS = (
    "slip_integral",
    "leakage_P",
    "leakage_Q",
    "leakage_D",
    "leakage_C",
    "energy_final",
    "energy_max",
    "kinetic_exterior",
)


@dataclass
class SweepResult:
    param: str
    values: list
    rows: list  # dicts: value + SWEEP_METRICS + masses
    slopes: dict
    monotone: dict
    runs: list = field(default_factory=list, repr=False)

    def column(self, name: str) -> list:
        return [row[name] for row in self.rows]


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    ok = (x > 0) & (y > 0)
    if ok.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


def summarize_run(value, result: RunResult) -> dict:
    recs = result.records
    row = {"value": value, "slip_integral": result.slip_integral}
    for s in ("P", "Q", "D", "C"):
        row[f"leakage_{s}"] = result.max_leakage(s)
        row[f"min_mass_{s}"] = result.min_mass(s)
    row["energy_initial"] = recs[0].energy_total
    row["energy_final"] = recs[-1].energy_total
    row["energy_max"] = max(r.energy_total for r in recs)
    row["kinetic_exterior"] = recs[-1].kinetic_exterior
    row["energy_bounded"] = energy_bounded(recs)
    return row


def parameter_sweep(spec: SweepSpec, keep_runs: bool = False) -> SweepResult:
    """Run the base config once per value, changing only ``spec.param``."""
    base = spec.base
    key = resolve_param(spec.param)
    ref_hash = config_hash(base, exclude=spec.param)
    rows, runs = [], []
    for value in spec.values:
        value = int(value) if key == ("grid", "N") else float(value)
        cfg = base.with_value(spec.param, value)
        if config_hash(cfg, exclude=spec.param) != ref_hash:  # pragma: no cover - defensive
            raise RuntimeError("sweep member differs from base outside the swept parameter")
        logger.info("sweep %s = %g", spec.param, value)
        result = run_simulation(cfg)
        rows.append(summarize_run(value, result))
        if keep_runs:
            runs.append(result)
    values = [r["value"] for r in rows]
    slopes = {m: loglog_slope(values, [r[m] for r in rows]) for m in SWEEP_METRICS}
    monotone = {}
    for m in SWEEP_METRICS:
        col = [r[m] for r in rows]
        monotone[m] = {
            "strictly_decreasing": all(b < a for a, b in zip(col, col[1:])),
            "nonincreasing": all(b <= a for a, b in zip(col, col[1:])),
        }
    return SweepResult(spec.param, values, rows, slopes, monotone, runs)


# ----------------------------------------------------------------- convergence


CONVERGENCE_CASES = ("advection-rotation", "diffusion-eigenmode", "levelset-rotation")


@dataclass
class ConvergenceResult:
    case: str
    resolutions: list
    errors: list
    orders: list


def observed_orders(errors: Sequence[float]) -> list:
    """Successive-ratio ``log2(e_k / e_{k+1})`` for doubling resolutions."""
    return [math.log2(a / b) for a, b in zip(errors, errors[1:])]


ROTATION_RATE = 1.0


def _rotated(points, angle: float):
    """Rotate ``points`` (shape ``(2, ...)``) by ``angle`` about the origin."""
    c, s = math.cos(angle), math.sin(angle)
    return np.stack([c * points[0] - s * points[1], s * points[0] + c * points[1]])


def _rotation_pulse_error(N: int, courant: float = 0.5) -> float:
    # Quarter turn of a wide bump inside the rigid plateau; the exact
    # solution is the bump rotated back along the closed orbits.
    grid = make_grid(1.0, N, 2)
    motion = rotation(ROTATION_RATE, 1.8)
    v = motion.on_grid(0.0, grid)
    t_end = 0.25 * 2.0 * math.pi / ROTATION_RATE

    def pulse(x):
        r2 = (x[0] - 0.5) ** 2 + x[1] ** 2
        return np.clip(1.0 - r2 / 0.5**2, 0.0, None) ** 3

    steps = math.ceil(t_end / cfl_timestep(v, grid.h, courant))
    dt = t_end / steps
    z = pulse(grid.coords)
    for _ in range(steps):
        z = upwind_advect(z, v, dt, grid)
    exact = pulse(_rotated(grid.coords, -ROTATION_RATE * t_end))
    return integrate(np.abs(z - exact), grid)


def _eigenmode_error(N: int, nu: float = 1.0, t_end: float = 0.05) -> float:
    grid = make_grid(1.0, N, 2)
    L = 4.0 * grid.radius
    mode = np.prod(np.sin(np.pi * (grid.coords + grid.half_width) / L), axis=0)
    params = PenaltyParams(omega=1.0)
    phi = -np.ones(grid.shape)
    C = step_nutrient(mode, phi, nu, params, t_end, grid)
    rate = nu * grid.dim * (np.pi / L) ** 2 + 1.0
    exact = math.exp(-rate * t_end) * mode
    return math.sqrt(integrate((C - exact) ** 2, grid))


def _levelset_rotation_error(N: int, courant: float = 1.0) -> float:
    # One full period.  The error is taken on r < 0.6, inside the rigid
    # plateau, where every orbit closes; the cutoff shell shears and its
    # flow map after one period is not the identity.
    grid = make_grid(1.0, N, 2)
    motion = rotation(ROTATION_RATE, 1.0)
    phi0 = signed_distance_sphere(grid, 0.25, center=(0.3, 0.0))
    period = 2.0 * math.pi / ROTATION_RATE
    vmax = float(np.max(np.sqrt(np.sum(motion.on_grid(0.0, grid) ** 2, axis=0))))
    steps = math.ceil(period / (courant * grid.h / vmax))
    dt = period / steps
    phi = phi0.copy()
    t = 0.0
    for _ in range(steps):
        phi = advect_levelset(phi, motion, t, dt, grid)
        t += dt
    rigid = grid.radius_field < 0.6
    return integrate(np.where(rigid, np.abs(phi - phi0), 0.0), grid)


_CASES = {
    "advection-rotation": _rotation_pulse_error,
    "diffusion-eigenmode": _eigenmode_error,
    "levelset-rotation": _levelset_rotation_error,
}


DEFAULT_RESOLUTIONS = {
    "advection-rotation": (64, 128, 256),
    "diffusion-eigenmode": (16, 32, 64),
    "levelset-rotation": (32, 64, 128),
}


def convergence_study(case: str, resolutions: Optional[Sequence[int]] = None) -> ConvergenceResult:
    """Errors against the analytic oracle of ``case`` and the observed orders.

    ``resolutions`` default to a ladder that is in the asymptotic range for
    each case (the upwind case needs finer grids than the others).
    """
    if case not in _CASES:
        raise ValueError(f"unknown convergence case {case!r}; choose from {CONVERGENCE_CASES}")
    res = [int(n) for n in (DEFAULT_RESOLUTIONS[case] if resolutions is None else resolutions)]
    if len(res) < 3:
        raise ValueError("need at least 3 resolutions")
    if any(b != 2 * a for a, b in zip(res, res[1:])):
        raise ValueError("resolutions must double")
    errors = [_CASES[case](n) for n in res]
    return ConvergenceResult(case, res, errors, observed_orders(errors))
