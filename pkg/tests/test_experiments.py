import math

import numpy as np
import pytest

from tumorpen import RunConfig, Simulation, SweepSpec, convergence_study, parameter_sweep, run_simulation
from tumorpen.config import config_hash
from tumorpen.errors import InstabilityDetected, MaxPrincipleViolated
from tumorpen.experiments import energy_bounded, loglog_slope, observed_orders
from tumorpen.nutrient import check_max_principle


def small(**changes):
    cfg = RunConfig().with_value("resolution", 32).with_value("t_end", 0.3)
    for k, v in changes.items():
        cfg = cfg.with_value(k, v)
    return cfg


def rest_config():
    cfg = small(motion="static").with_value("initial.preset", "rest").with_value("amp_C", 0.0)
    for rate in ("K_B", "K_Q", "K_P", "K_A", "K_D", "K_R"):
        cfg = cfg.with_value(rate, 0.0)
    return cfg


def test_zero_data_run():
    result = run_simulation(small(motion="static").with_value("initial.preset", "zero"))
    for rec in result.records:
        assert all(v == 0.0 for k, v in zip(rec.field_names(), rec.values()) if k not in ("t", "dt"))
    s = result.final_state
    for name in ("P", "Q", "D", "C", "v", "m"):
        assert not np.any(getattr(s, name))


def test_zero_data_under_moving_boundary():
    # Velocity stays defined in vacuum and relaxes toward V at the band,
    # so only the slip columns move; all physical content stays zero.
    result = run_simulation(small().with_value("initial.preset", "zero"))
    moving = {"t", "dt", "slip_norm_sq", "slip_integral"}
    for rec in result.records:
        assert all(v == 0.0 for k, v in zip(rec.field_names(), rec.values()) if k not in moving)
    assert not np.any(result.final_state.m)


def test_rest_run_records_constant():
    result = run_simulation(rest_config())
    first = result.records[0]
    for rec in result.records[1:]:
        for name, a, b in zip(rec.field_names(), rec.values(), first.values()):
            if name in ("t", "dt"):
                continue
            assert a == pytest.approx(b, rel=1e-12, abs=1e-15), name


def test_default_run_invariants():
    result = run_simulation(small())
    sim = Simulation(result.config)
    C0_max = result.records[0].c_max
    c_bar = result.config.kinetics.C_bar
    assert energy_bounded(result.records)
    for rec in result.records:
        assert 0.0 <= rec.c_max <= max(C0_max, c_bar)
        assert math.isfinite(rec.slip_norm_sq)
        assert min(rec.mass_P, rec.mass_Q, rec.mass_D, rec.mass_C) >= 0.0
    s = result.final_state
    assert all(np.all(getattr(s, n) >= 0) for n in ("P", "Q", "D", "C"))
    assert check_max_principle(s.C, C0_max, c_bar)
    assert result.records[-1].t == pytest.approx(0.3, abs=1e-12)
    assert sim.grid.n == 32


def test_output_every_thins_records():
    every = run_simulation(small(output_every=5))
    assert [round(r.t, 10) for r in every.records[:3]] == [0.0, 0.05, 0.1]
    assert every.records[-1].t == pytest.approx(0.3)


def test_runs_are_deterministic():
    a = run_simulation(small())
    b = run_simulation(small())
    assert [r.values() for r in a.records] == [r.values() for r in b.records]


def test_step_flags_nonfinite(monkeypatch):
    import tumorpen.experiments as ex

    sim = Simulation(small())
    state = sim.initial_state()
    monkeypatch.setattr(ex, "step_nutrient", lambda C, *a: C * np.nan)
    with pytest.raises(InstabilityDetected):
        sim.step(state, 0.01)


def test_step_flags_max_principle(monkeypatch):
    import tumorpen.experiments as ex

    sim = Simulation(small())
    state = sim.initial_state()
    monkeypatch.setattr(ex, "step_nutrient", lambda C, *a: C + 1.0)
    with pytest.raises(MaxPrincipleViolated):
        sim.step(state, 0.01)


def test_sweep_spec_validation():
    base = small()
    with pytest.raises(ValueError):
        SweepSpec("epsilon", (0.1, 0.01), base)
    with pytest.raises(ValueError):
        SweepSpec("epsilon", (0.01, 0.1, 1.0), base)
    with pytest.raises(ValueError):
        SweepSpec("mu", (1.0, 0.1, 0.01), base)
    with pytest.raises(ValueError):
        SweepSpec("omega", (1.0, -0.1, -1.0), base)
    SweepSpec("resolution", (16, 32, 64), base)


def test_sweep_isolation():
    result = parameter_sweep(SweepSpec("delta", (0.1, 0.01, 0.001), small(t_end=0.1)), keep_runs=True)
    hashes = {config_hash(r.config, exclude="delta") for r in result.runs}
    assert len(hashes) == 1
    assert [r.config.penalty.delta for r in result.runs] == [0.1, 0.01, 0.001]
    assert result.column("value") == [0.1, 0.01, 0.001]


def test_loglog_slope_and_orders():
    x = [1.0, 0.1, 0.01]
    assert loglog_slope(x, [2 * v**1.5 for v in x]) == pytest.approx(1.5)
    assert math.isnan(loglog_slope(x, [0.0, 0.0, 0.0]))
    assert observed_orders([4.0, 1.0, 0.25]) == [2.0, 2.0]


def test_convergence_study_validation():
    with pytest.raises(ValueError):
        convergence_study("advection-rotation", [16, 32])
    with pytest.raises(ValueError):
        convergence_study("advection-rotation", [16, 24, 48])
    with pytest.raises(ValueError):
        convergence_study("burgers", [16, 32, 64])


def test_delta_sweep_energy_settles():
    result = parameter_sweep(SweepSpec("delta", (0.1, 0.01, 0.001), RunConfig()))
    e = result.column("energy_final")
    assert abs(e[2] - e[1]) / e[2] < 0.05
    assert all(result.column("energy_bounded"))


def test_omega_sweep_exterior_kinetic_energy():
    # Measured: exterior kinetic energy is nearly flat in omega (a few
    # percent rise toward omega -> 0), not monotone decreasing.
    result = parameter_sweep(SweepSpec("omega", (1.0, 0.1, 0.01), RunConfig()))
    ke = result.column("kinetic_exterior")
    assert max(ke) / min(ke) < 1.1
    assert all(result.column("energy_bounded"))
