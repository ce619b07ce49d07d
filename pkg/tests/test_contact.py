import numpy as np
import pytest

from vibropair import (
    EventKind,
    Mode,
    Scenario,
    ScenarioKind,
    SimState,
    SystemParams,
    contact_force,
    contact_force_raw,
    decaying_cycle_profile,
    hysteresis_trace,
    loop_energy,
    penetration,
    preset,
    restitution_coefficient,
    simulate,
)


def params(k=1e4, alpha=0.1, n=1.0):
    return SystemParams(m2=0.05, b=0.2, k=k, alpha=alpha, n=n)


class TestPenetration:
    def test_before_wall(self):
        assert penetration(0.04, 0.05) == 0.0

    def test_at_wall(self):
        assert penetration(0.05, 0.05) == 0.0

    def test_inside(self):
        assert penetration(0.05 + 2e-4, 0.05) == pytest.approx(2e-4)


class TestContactForce:
    def test_zero_at_zero_penetration_any_rate(self):
        rng = np.random.default_rng(3)
        p = params(alpha=0.7)
        for p_dot in rng.uniform(-2.0, 2.0, 1000):
            assert contact_force(0.0, p_dot, p) == 0.0

    def test_elastic_only_when_alpha_zero(self):
        assert contact_force(0.01, 123.0, params(alpha=0.0)) == pytest.approx(100.0)

    def test_damping_term(self):
        assert contact_force(0.001, 1.0, params(alpha=0.1)) == pytest.approx(11.5)

    def test_negative_penetration_rejected(self):
        with pytest.raises(ValueError):
            contact_force(-1e-9, 0.0, params())

    def test_clamped_nonnegative(self):
        # fast withdrawal makes the raw force negative; clamped to 0
        p = params(alpha=1.0)
        assert contact_force_raw(1e-3, -1.0, p) < 0.0
        assert contact_force(1e-3, -1.0, p) == 0.0

    def test_monotone_in_penetration(self):
        p = params(alpha=0.2, n=1.5)
        pens = np.linspace(0.0, 5e-3, 200)
        for p_dot in (0.0, 0.5, 2.0):
            f = [contact_force(x, p_dot, p) for x in pens]
            assert np.all(np.diff(f) >= 0.0)

    def test_hertzian_exponent_sublinear_near_zero(self):
        p = params(alpha=0.0, n=1.5)
        # secant stiffness vanishes at p -> 0 for n = 3/2
        assert contact_force(1e-8, 0.0, p) / 1e-8 < contact_force(1e-3, 0.0, p) / 1e-3


class TestRestitution:
    def test_nominal(self):
        assert restitution_coefficient(1.0, 0.1) == pytest.approx(0.9)

    def test_zero_speed_lossless(self):
        assert restitution_coefficient(0.0, 5.0) == 1.0

    def test_plastic_clamp(self):
        assert restitution_coefficient(20.0, 0.1) == 0.0

    def test_negative_speed_rejected(self):
        with pytest.raises(ValueError):
            restitution_coefficient(-0.1, 0.1)


class TestHysteresis:
    def test_loop_area_ordering_in_alpha(self):
        _, profile = decaying_cycle_profile()
        dt = 1.0 / 5000.0
        e_small = loop_energy(hysteresis_trace(profile, dt, params(alpha=0.1)))
        e_large = loop_energy(hysteresis_trace(profile, dt, params(alpha=1.0)))
        assert e_large > e_small > 0.0

    def test_zero_profile_all_zero(self):
        trace = hysteresis_trace(np.zeros(100), 1e-3, params())
        assert all(s.p == 0.0 and s.p_dot == 0.0 and s.f == 0.0 for s in trace)

    def test_triangle_pulse_elastic_zero_area(self):
        up = np.linspace(0.0, 1e-3, 101)
        profile = np.concatenate([up, up[-2::-1]])
        trace = hysteresis_trace(profile, 1e-4, params(alpha=0.0))
        assert loop_energy(trace) == pytest.approx(0.0, abs=1e-15)

    def test_loops_close_at_origin(self):
        _, profile = decaying_cycle_profile()
        trace = hysteresis_trace(profile, 1.0 / 5000.0, params(alpha=1.0))
        assert trace[0].p == 0.0 and trace[0].f == 0.0
        assert trace[-1].p == 0.0 and trace[-1].f == 0.0

    def test_negative_profile_rejected(self):
        with pytest.raises(ValueError):
            hysteresis_trace([0.0, -1e-6, 0.0], 1e-3, params())

    def test_unclosed_cycle_flagged(self):
        profile = np.linspace(0.0, 1e-3, 50)
        trace = hysteresis_trace(profile, 1e-3, params())
        with pytest.raises(ValueError):
            loop_energy(trace)

    def test_loop_area_scales_linearly_with_alpha(self):
        # elastic part cancels over a closed cycle; the area is the damping
        # work, proportional to lam = 1.5*alpha*k
        _, profile = decaying_cycle_profile()
        dt = 1.0 / 5000.0
        e1 = loop_energy(hysteresis_trace(profile, dt, params(alpha=0.1)))
        e2 = loop_energy(hysteresis_trace(profile, dt, params(alpha=1.0)))
        assert e2 / e1 == pytest.approx(10.0, rel=1e-6)


class TestLoopEnergyAgainstImpact:
    def test_matches_kinetic_energy_loss_of_free_impact(self):
        # a simulated free impact dissipates exactly the (p, f) loop area
        # (friction made negligible)
        p = preset("steel", alpha=0.2, b=1e-8).replace(v_platform=0.0)
        dt = 2e-5
        init = SimState(0.0, 0.0, 0.0, -1e-4, 0.5, Mode.SLIP_FREE)
        scenario = Scenario(ScenarioKind.IDLE_IMPULSE, init, p, t_end=0.05, dt=dt)
        traj = simulate(scenario)
        imp = traj.events_of(EventKind.IMPACT)[0]
        sep = traj.events_of(EventKind.SEPARATION)[0]
        dke = 0.5 * p.m2 * (imp.v_in**2 - sep.state_at_event.v2**2)
        # integrate f dp over the contact window (padded by one zero sample)
        in_contact = traj.p > 0.0
        idx = np.flatnonzero(in_contact)
        sl = slice(idx[0] - 1, idx[-1] + 2)
        pp, ff = traj.p[sl], traj.f[sl]
        loop = float(np.sum(0.5 * (ff[1:] + ff[:-1]) * np.diff(pp)))
        assert loop == pytest.approx(dke, rel=0.02)
