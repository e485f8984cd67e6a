import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graspforge.transmission import (
    DesignParams,
    HandState,
    Mode,
    TransmissionConfig,
    actuation_torques,
    net_joint_torques,
    parallel_coupling_torque,
    slider_from_position,
    slider_state,
)

REL = 1e-9
OPT = DesignParams.table_optimum()


def close(a, b, rel=REL):
    return a == pytest.approx(b, rel=rel, abs=1e-12)


def test_table_optimum_units():
    assert OPT.R_M == pytest.approx(0.020)
    assert OPT.r_M == pytest.approx(0.019)
    assert OPT.k_s == pytest.approx(3100.0)
    assert OPT.violations() == []


def test_design_violations():
    bad = DesignParams.from_table_units(l_D=74, l_P=92, l_M=80, r_I=7.5, R_I=8, R_M=20, k_s=3.1, T_pt=24)
    assert any("r_I" in v for v in bad.violations())
    with pytest.raises(ValueError):
        bad.validate()


class TestActuation:
    def test_zero_input(self):
        out = actuation_torques(HandState(), OPT, 0.0, 0.0)
        assert out.as_tuple() == (0.0, 0.0, 0.0, 0.0, 0.0)

    def test_extended_full_tension(self):
        out = actuation_torques(HandState(), OPT, 100.0, 0.0)
        assert close(out.tau_M1, (0.020 * 1 + 0.019) * 100)
        assert close(out.tau_I1, (0.008 * 1 - 0.007) * 100)
        assert close(out.tau_c, 100.0)

    def test_ip_at_right_angle(self):
        out = actuation_torques(HandState(theta_I1=math.pi / 2), OPT, 100.0, 0.0)
        assert close(out.tau_I1, (0.008 * math.sqrt(2) - 0.007) * 100)
        assert out.tau_I1 == pytest.approx(0.4314, abs=1e-4)

    def test_slider_tension_columns(self):
        base = actuation_torques(HandState(), OPT, 50.0, 0.0)
        with_ts = actuation_torques(HandState(), OPT, 50.0, 10.0)
        assert with_ts.tau_M1 == base.tau_M1
        assert with_ts.tau_I1 == base.tau_I1
        assert close(with_ts.tau_M2 - base.tau_M2, OPT.r_M * 10.0)
        assert close(with_ts.tau_I2 - base.tau_I2, -OPT.r_I * 10.0)
        assert close(with_ts.tau_c, 40.0)


class TestSlider:
    def test_initial_posture_is_parallel(self):
        cfg = TransmissionConfig().with_offset_for(HandState.initial(), OPT)
        s = slider_state(HandState.initial(), OPT, cfg)
        assert s.x_t == pytest.approx(0.0, abs=1e-15)
        assert s.x_s_free == pytest.approx(-OPT.T_pt / (1e6 + OPT.k_s))
        assert s.x_s == 0.0 and s.T_s == 0.0
        assert s.mode is Mode.PARALLEL

    def test_pull_in(self):
        cfg = TransmissionConfig(K=1e6, x_max=0.05)
        s = slider_from_position(0.01, OPT, cfg)
        expected = (1e6 * 0.01 - 24) / (1e6 + 3100)
        assert close(s.x_s, expected)
        assert s.x_s == pytest.approx(9.945e-3, rel=1e-3)
        assert close(s.T_s, 1e6 * (0.01 - expected))
        assert close(s.T_s, OPT.T_pt + OPT.k_s * s.x_s, rel=1e-6)
        assert s.T_s == pytest.approx(55.0, abs=0.2)
        assert s.mode is Mode.PULL_IN

    def test_power_grasp(self):
        cfg = TransmissionConfig(K=1e6, x_max=0.05)
        s = slider_from_position(0.051, OPT, cfg)
        assert s.x_s == 0.05
        assert close(s.T_s, 1000.0)
        assert s.mode is Mode.POWER_GRASP

    def test_pretension_at_mode_boundary(self):
        cfg = TransmissionConfig()
        s = slider_from_position(OPT.T_pt / cfg.K, OPT, cfg)
        assert close(s.T_s, OPT.T_pt)

    @pytest.mark.parametrize(
        "x_t, slope",
        [
            (5e-6, 1e6),  # mode 1
            (0.005, 1e6 * 3100 / (1e6 + 3100)),  # mode 2
            (0.03, 1e6),  # mode 3
        ],
    )
    def test_piecewise_slopes(self, x_t, slope):
        cfg = TransmissionConfig(x_max=0.02)
        h = 1e-7
        fd = (slider_from_position(x_t + h, OPT, cfg).T_s - slider_from_position(x_t - h, OPT, cfg).T_s) / (2 * h)
        assert fd == pytest.approx(slope, rel=0.01)

    def test_mode_two_slope_close_to_spring(self):
        cfg = TransmissionConfig()
        fd = (slider_from_position(0.006, OPT, cfg).T_s - slider_from_position(0.004, OPT, cfg).T_s) / 0.002
        assert fd == pytest.approx(OPT.k_s, rel=0.01)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-0.01, 0.08), st.floats(1e-7, 0.01))
    def test_tension_monotone(self, x_t, dx):
        cfg = TransmissionConfig(x_max=0.02)
        a = slider_from_position(x_t, OPT, cfg)
        b = slider_from_position(x_t + dx, OPT, cfg)
        assert b.T_s >= a.T_s - 1e-9
        assert 0.0 <= a.x_s <= cfg.x_max
        assert a.T_s >= 0.0
        if a.x_s_free < 0:
            assert a.mode is Mode.PARALLEL
        elif a.x_s_free > cfg.x_max:
            assert a.mode is Mode.POWER_GRASP
        else:
            assert a.mode is Mode.PULL_IN

    @settings(max_examples=100, deadline=None)
    @given(st.floats(-0.01, 0.08))
    def test_tension_continuous(self, x_t):
        cfg = TransmissionConfig(x_max=0.02)
        h = 1e-10
        a = slider_from_position(x_t, OPT, cfg).T_s
        b = slider_from_position(x_t + h, OPT, cfg).T_s
        assert abs(b - a) <= cfg.K * h * 1.0001


class TestCoupling:
    def test_boundary_without_preload(self):
        cfg = TransmissionConfig(theta_e_ofs=0.0)
        assert parallel_coupling_torque(cfg.theta_ofs - 0.3, 0.3, cfg) == 0.0

    def test_flexed_past_parallel(self):
        cfg = TransmissionConfig()
        tau = parallel_coupling_torque(2 * math.pi / 3 + 0.1, 0.0, cfg)
        assert close(tau, -0.1 * (0.1 + math.pi / 6))
        assert tau == pytest.approx(-0.06236, abs=1e-5)

    def test_stopper_branch(self):
        cfg = TransmissionConfig(K_prime=100.0)
        tau = parallel_coupling_torque(2 * math.pi / 3 - 0.01, 0.0, cfg)
        assert close(tau, -1.0, rel=1e-6)

    def test_preload_jump_at_boundary(self):
        cfg = TransmissionConfig()
        eps = 1e-12
        above = parallel_coupling_torque(cfg.theta_ofs + eps, 0.0, cfg)
        below = parallel_coupling_torque(cfg.theta_ofs - eps, 0.0, cfg)
        assert above - below == pytest.approx(-cfg.k_e * cfg.theta_e_ofs, rel=1e-6)

    def test_continuous_without_preload(self):
        cfg = TransmissionConfig(theta_e_ofs=0.0)
        eps = 1e-9
        above = parallel_coupling_torque(cfg.theta_ofs + eps, 0.0, cfg)
        below = parallel_coupling_torque(cfg.theta_ofs - eps, 0.0, cfg)
        assert abs(above - below) < 1e-6


class TestNetTorques:
    def setup_method(self):
        self.cfg = TransmissionConfig().with_offset_for(HandState.initial(), OPT)
        self.rest = HandState.initial(self.cfg)

    def test_static_extended_hand(self):
        out = net_joint_torques(self.rest, OPT, self.cfg, 0.0)
        preload = -0.1 * math.pi / 6
        assert close(out.tau_I1, preload)
        assert close(out.tau_M1, preload - 0.1 * 2 * math.pi / 3)
        assert preload == pytest.approx(-0.05236, abs=1e-5)
        assert -0.1 * 2 * math.pi / 3 == pytest.approx(-0.2094, abs=1e-4)
        assert close(out.tau_I2, out.tau_I1) and close(out.tau_M2, out.tau_M1)
        assert out.tau_c == 0.0

    def test_superposition_with_tension(self):
        springs = net_joint_torques(self.rest, OPT, self.cfg, 0.0)
        raw = actuation_torques(self.rest, OPT, 100.0, 0.0)
        out = net_joint_torques(self.rest, OPT, self.cfg, 100.0)
        for a, b, c in zip(out.as_tuple(), raw.as_tuple(), springs.as_tuple()):
            assert close(a, b + c)

    @pytest.mark.parametrize("K_dd", [0.05, 0.3])
    def test_damping_is_linear(self, K_dd):
        import dataclasses

        moving = dataclasses.replace(self.rest, dtheta_M1=0.7, dtheta_I1=-0.2, dtheta_M2=1.5, dtheta_I2=0.4)
        undamped = net_joint_torques(moving, OPT, dataclasses.replace(self.cfg, K_dd=0.0), 60.0)
        damped = net_joint_torques(moving, OPT, dataclasses.replace(self.cfg, K_dd=K_dd), 60.0)
        rates = (0.7, -0.2, 1.5, 0.4)
        for a, b, v in zip(damped.as_tuple()[:4], undamped.as_tuple()[:4], rates):
            assert a - b == pytest.approx(-K_dd * v, rel=1e-9)
        assert damped.tau_c == undamped.tau_c


angles = st.floats(0.0, math.pi)


@settings(max_examples=200, deadline=None)
@given(angles, angles, angles, angles, st.floats(-0.02, 0.05), st.floats(0, 100), st.floats(0.1, 5.0))
def test_net_torque_properties(m1, i1, m2, i2, c, T_m, scale):
    cfg = TransmissionConfig()
    state = HandState(m1, i1, m2, i2, c)
    out = net_joint_torques(state, OPT, cfg, T_m)
    s = slider_state(state, OPT, cfg)
    assert out.tau_c == T_m - s.T_s
    assert all(math.isfinite(v) for v in out.as_tuple())

    # raw torques are linear in the two tensions
    a = actuation_torques(state, OPT, T_m, s.T_s).as_tuple()
    b = actuation_torques(state, OPT, scale * T_m, scale * s.T_s).as_tuple()
    for x, y in zip(a, b):
        assert y == pytest.approx(scale * x, rel=1e-9, abs=1e-12)
