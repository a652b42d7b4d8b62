import numpy as np
import pytest

from annealgate import schedules
from annealgate.operators import build_matrix, identity, uniform_x, x_on, z_on
from annealgate.schedules import (ControlSchedule, DWaveSchedule, PiecewiseLinear,
                                  ScheduleBoundaryError, conventional, dwave,
                                  forward, reverse)

HD = x_on(1, 1, -1.0)
HP = identity(1).scaled(-1.0)
HC = z_on(1, 1)


def _mat(sched, t):
    return build_matrix(sched.sample(t))


def test_conventional_endpoints_and_midpoint():
    sched = conventional(HD, HP, 10.0)
    assert np.allclose(_mat(sched, 0.0), build_matrix(HD), atol=1e-15)
    assert np.allclose(_mat(sched, 10.0), build_matrix(HP), atol=1e-15)
    assert np.allclose(_mat(sched, 5.0),
                       0.5 * (build_matrix(HD) + build_matrix(HP)), atol=1e-15)


def test_conventional_rejects_mismatched_registers():
    with pytest.raises(ValueError):
        conventional(x_on(1, 1, -1.0), identity(2), 1.0)


def test_forward_with_zero_pulse_matches_conventional():
    fwd = forward(HD, HP, HC, 0.0, 7.0)
    conv = conventional(HD, HP, 7.0)
    rng = np.random.default_rng(3)
    for t in rng.uniform(0.0, 7.0, size=1000):
        assert np.max(np.abs(_mat(fwd, t) - _mat(conv, t))) <= 1e-14


def test_forward_endpoints_hold_for_any_pulse():
    for hz in (-1.5, 0.7, 3.0):
        fwd = forward(HD, HP, HC, hz, 4.0)
        assert np.allclose(_mat(fwd, 0.0), build_matrix(HD), atol=1e-15)
        assert np.allclose(_mat(fwd, 4.0), build_matrix(HP), atol=1e-15)


def test_forward_midpoint_value_and_continuity():
    hz, T = 1.0, 6.0
    fwd = forward(HD, HP, HC, hz, T)
    mid = 0.5 * (build_matrix(HD) + build_matrix(HP) + hz * build_matrix(HC))
    assert np.allclose(_mat(fwd, T / 2), mid, atol=1e-15)
    eps = 1e-9
    left = _mat(fwd, T / 2 - eps)
    right = _mat(fwd, T / 2 + eps)
    assert np.max(np.abs(left - right)) <= 1e-8


def test_forward_pulse_rises_then_falls():
    hz, T = 2.0, 8.0
    fwd = forward(HD, HP, HC, hz, T)
    # the catalytic coefficient is (t/T) h_z on the way up
    t = 2.0
    expected = ((1 - t / T) * build_matrix(HD) + (t / T) * build_matrix(HP)
                + (t / T) * hz * build_matrix(HC))
    assert np.allclose(_mat(fwd, t), expected, atol=1e-14)
    t = 6.0
    expected = ((1 - t / T) * build_matrix(HD) + (t / T) * build_matrix(HP)
                + (1 - t / T) * hz * build_matrix(HC))
    assert np.allclose(_mat(fwd, t), expected, atol=1e-14)


def test_reverse_endpoints_and_midpoint():
    lifted = z_on(1, 1)
    rev = reverse(HD, lifted, 12.0)
    assert np.allclose(_mat(rev, 0.0), build_matrix(lifted), atol=1e-15)
    assert np.allclose(_mat(rev, 12.0), build_matrix(HD), atol=1e-15)
    assert np.allclose(_mat(rev, 6.0),
                       0.5 * (build_matrix(HD) + build_matrix(lifted)), atol=1e-15)


def test_sample_continuity_at_knots():
    fwd = forward(HD, HP, HC, 1.3, 10.0)
    eps = 1e-10
    for knot in fwd.knot_times():
        lo = max(knot - eps, 0.0)
        hi = min(knot + eps, 10.0)
        assert np.max(np.abs(_mat(fwd, lo) - _mat(fwd, hi))) <= 1e-8


def test_sample_outside_domain_rejected():
    sched = conventional(HD, HP, 1.0)
    with pytest.raises(ValueError):
        sched.sample(-0.1)
    with pytest.raises(ValueError):
        sched.sample(1.1)


def test_piecewise_linear_interpolation():
    T = 8.0
    g = PiecewiseLinear((0.0, T / 2, T), (0.0, 2.0, 1.0))
    assert g.value(3 * T / 4) == pytest.approx(1.5)
    assert g.value(0.0) == 0.0
    assert g.value(T) == 1.0


def test_dwave_boundaries():
    spec = DWaveSchedule(h=(1.0,), J={}, g=schedules.constant(0.0))
    sched = dwave(spec, 10.0)
    start = _mat(sched, 0.0)
    assert np.allclose(start, build_matrix(uniform_x(1, -0.5)), atol=1e-15)
    end = _mat(sched, 10.0)
    assert np.max(np.abs(end)) <= 1e-15  # no transverse field left


def test_dwave_midpoint_longitudinal_amplitude():
    hz, T = 1.7, 20.0
    g = PiecewiseLinear((0.0, T / 2, T), (0.0, hz, 0.0))
    spec = DWaveSchedule(h=(1.0,), J={}, g=g)
    sched = dwave(spec, T)
    # longitudinal block carries h_z * B(1/2) / 2 at the midpoint
    mid = sched.sample(T / 2)
    z_coeff = sum(t.coefficient for t in mid.terms if t.factors == "Z")
    assert z_coeff == pytest.approx(hz * 0.5 / 2.0)


def test_dwave_boundary_violation_raises():
    bad_a = PiecewiseLinear((0.0, 1.0), (1.0, 0.5))
    spec = DWaveSchedule(h=(1.0,), J={}, g=schedules.constant(0.0), A=bad_a)
    with pytest.raises(ScheduleBoundaryError):
        dwave(spec, 1.0)


def test_dwave_coupling_block():
    spec = DWaveSchedule(h=(1.0, 0.3), J={(2, 1): 0.3}, g=schedules.constant(1.0))
    sched = dwave(spec, 4.0)
    end = sched.sample(4.0)
    zz = sum(t.coefficient for t in end.terms if t.factors == "ZZ")
    assert zz == pytest.approx(0.3 / 2.0)


def test_dwave_transverse_block_vanishes_only_at_end():
    spec = DWaveSchedule(h=(1.0,), J={}, g=schedules.constant(0.0))
    sched = dwave(spec, 2.0)
    x_mid = sum(t.coefficient for t in sched.sample(1.0).terms if t.factors == "X")
    assert x_mid == pytest.approx(-0.25)


def test_module_level_sample_alias():
    sched = conventional(HD, HP, 2.0)
    assert np.allclose(build_matrix(schedules.sample(sched, 1.0)), _mat(sched, 1.0))
