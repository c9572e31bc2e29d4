import numpy as np

from tumorpen.grid import make_grid
from tumorpen.presets import InitialData, bump, initial_state
from tumorpen.state import State


def test_tumor_preset_support_and_amplitudes():
    g = make_grid(1.0, 64, 2)
    data = InitialData()
    s = initial_state(data, g)
    outside = s.phi >= 0
    for name in ("P", "Q", "D", "C"):
        z = getattr(s, name)
        assert np.all(z[outside] == 0) and np.all(z >= 0) and z.max() > 0
    assert s.C.max() <= data.amp_C
    np.testing.assert_allclose(s.Q, 0.5 * s.P)
    assert not np.any(s.v) and not np.any(s.m)


def test_bump_shape():
    r = np.array([0.0, 0.5, 1.0, 2.0])
    np.testing.assert_allclose(bump(r, 1.0), [1.0, 0.421875, 0.0, 0.0])


def test_verification_presets():
    g = make_grid(1.0, 16, 2)
    zero = initial_state(InitialData(preset="zero"), g)
    assert not any(np.any(getattr(zero, n)) for n in ("P", "Q", "D", "C"))
    rest = initial_state(InitialData(preset="rest"), g)
    np.testing.assert_array_equal(rest.rho, 1.6)


def test_state_copy_is_deep():
    g = make_grid(1.0, 8, 2)
    s = State.zeros(g)
    c = s.copy()
    c.P[0, 0] = 1.0
    c.v[1, 2, 2] = 3.0
    assert s.P[0, 0] == 0.0 and s.v[1, 2, 2] == 0.0
    assert list(s.named_fields()) == ["P", "Q", "D", "C", "v0", "v1", "m0", "m1", "phi"]
    assert s.is_finite()
    c.C[1, 1] = np.nan
    assert not c.is_finite()
