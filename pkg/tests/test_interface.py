"""Admittance, adaptive index and velocity fusion unit tests."""

import numpy as np
import pytest

from cocarry.geometry import PoseSE3
from cocarry.interface import (
    AdmittanceParams,
    AdmittanceState,
    ForceFilter,
    ReferenceState,
    SlidingWindow,
    adaptive_index,
    admittance_step,
    default_admittance_params,
    fuse_velocity,
    integrate_reference,
)


def test_admittance_steady_state_matches_f_over_d():
    # constant 15 N on x with M=12, D=150 -> v_ss = 0.1 m/s, within 1% in 1 s
    p = default_admittance_params()
    state = AdmittanceState()
    F = np.array([15.0, 0.0, 0.0])
    dt = 0.01
    for _ in range(100):
        state = admittance_step(F, state, p, dt)
    assert state.v_adm[0] == pytest.approx(0.100, rel=0.01)
    assert np.allclose(state.v_adm[1:], 0.0)


def test_admittance_discrete_solution_matches_exact():
    # single axis: exact solution v(t) = (F/D)(1 - exp(-D t / M))
    p = AdmittanceParams(mass=[2.0, 2.0, 2.0], damping=[8.0, 8.0, 8.0])
    state = AdmittanceState()
    F = np.array([4.0, 0.0, 0.0])
    dt = 1e-4
    for _ in range(10000):  # 1 s at fine dt
        state = admittance_step(F, state, p, dt)
    exact = (4.0 / 8.0) * (1 - np.exp(-8.0 / 2.0 * 1.0))
    assert state.v_adm[0] == pytest.approx(exact, rel=1e-3)


def test_admittance_rejects_bad_input():
    p = default_admittance_params()
    with pytest.raises(ValueError):
        admittance_step(np.array([np.nan, 0, 0]), AdmittanceState(), p, 0.01)
    with pytest.raises(ValueError):
        admittance_step(np.zeros(3), AdmittanceState(), p, 0.0)
    with pytest.raises(ValueError):
        AdmittanceParams(mass=[0, 1, 1], damping=[1, 1, 1])


def test_window_prunes_old_samples():
    w = SlidingWindow(length=0.5)
    for k in range(200):
        w.push(k * 0.01, np.zeros(3), np.zeros(3))
    times = [s[0] for s in w._samples]
    assert min(times) >= 199 * 0.01 - 0.5 - 1e-12
    assert len(w) <= 52


def test_window_rejects_non_monotone():
    w = SlidingWindow()
    w.push(0.0, np.zeros(3), np.zeros(3))
    with pytest.raises(ValueError):
        w.push(0.0, np.zeros(3), np.zeros(3))


def test_adaptive_index_extremes():
    # rigid: admittance displacement ~= hand displacement -> alpha ~= 0
    w = SlidingWindow(length=0.5)
    v = np.array([0.3, 0.0, 0.0])
    for k in range(60):
        w.push(k * 0.01, v, v)
    assert adaptive_index(w) == pytest.approx(0.0, abs=1e-5)

    # deformable: no admittance motion while the hand moves -> alpha = 1
    w = SlidingWindow(length=0.5)
    for k in range(60):
        w.push(k * 0.01, np.zeros(3), v)
    assert adaptive_index(w) == 1.0


def test_adaptive_index_clamped():
    # admittance displacement larger than hand displacement clamps at 0
    w = SlidingWindow(length=0.5)
    for k in range(60):
        w.push(k * 0.01, np.array([1.0, 0, 0]), np.array([0.2, 0, 0]))
    assert adaptive_index(w) == 0.0


def test_adaptive_index_matches_hand_integration():
    # oracle: numpy trapezoid over the same sample history
    rng = np.random.default_rng(2)
    w = SlidingWindow(length=0.5)
    ts, va, vh = [], [], []
    for k in range(80):
        t = k * 0.01
        a = rng.uniform(-0.2, 0.2, size=3)
        h = rng.uniform(-0.4, 0.4, size=3)
        w.push(t, a, h)
        ts.append(t)
        va.append(a)
        vh.append(h)
    keep = [i for i, t in enumerate(ts) if t >= ts[-1] - 0.5]
    t_arr = np.array(ts)[keep]
    d_adm = np.array([np.trapezoid(np.array(va)[keep, i], t_arr) for i in range(3)])
    d_h = np.array([np.trapezoid(np.array(vh)[keep, i], t_arr) for i in range(3)])
    expect = 1.0 - np.linalg.norm(d_adm) / (np.linalg.norm(d_h) + w.epsilon)
    expect = min(1.0, max(0.0, expect))
    assert adaptive_index(w) == pytest.approx(expect, abs=1e-12)


def test_fuse_velocity():
    v_adm = np.array([0.1, 0.0, 0.0])
    v_h = np.array([0.0, 0.2, 0.0])
    assert np.allclose(fuse_velocity(v_adm, v_h, 0.0), v_adm)
    assert np.allclose(fuse_velocity(v_adm, v_h, 1.0), v_adm + v_h)
    with pytest.raises(ValueError):
        fuse_velocity(v_adm, v_h, 1.5)


def test_integrate_reference():
    ref = ReferenceState(x_d=PoseSE3.identity(), alpha=0.4)
    out = integrate_reference(ref, np.array([1.0, 2.0, 0.0]), 0.1)
    assert np.allclose(out.x_d.position, [0.1, 0.2, 0.0])
    assert out.alpha == 0.4
    assert np.allclose(ref.x_d.position, 0.0)  # input untouched


def test_force_filter_passthrough_and_lag():
    f = ForceFilter(time_constant=0.0)
    x = np.array([1.0, 2.0, 3.0])
    assert np.allclose(f.apply(x, 0.01), x)
    f = ForceFilter(time_constant=0.1)
    f.apply(np.zeros(3), 0.01)
    y = f.apply(x, 0.01)
    assert np.all(np.abs(y) < np.abs(x))  # lags behind a step
