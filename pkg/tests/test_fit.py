import numpy as np
import pytest

from vibropair import (
    FitConfig,
    FitProblem,
    MeasuredTrace,
    fit,
    flat_parameters,
    idle_impulse,
    objective,
    preset,
    profile_coupling,
    simulate,
)

TRUTH = preset("steel", alpha=0.3, k=1.0e4)


def _synthetic(noise=0.0, seed=42, t_end=0.12):
    scenario = idle_impulse(TRUTH, gap=0.02, t_end=t_end)
    traj = simulate(scenario)
    x2 = traj.x2.copy()
    if noise > 0.0:
        rng = np.random.default_rng(seed)
        amp = noise * (np.max(x2) - np.min(x2))
        x2 = x2 + rng.normal(0.0, amp, x2.shape)
    trace = MeasuredTrace(fs=1.0 / traj.dt, t=traj.t.copy(), x2=x2)
    return trace, scenario


def _problem(trace, scenario, free=None):
    return FitProblem(trace=trace, scenario=scenario,
                      free=free or {"k": (1e3, 1e5), "alpha": (0.0, 2.0)})


class TestProblemValidation:
    def test_unknown_parameter_rejected(self):
        trace, scenario = _synthetic(t_end=0.01)
        with pytest.raises(ValueError):
            _problem(trace, scenario, free={"m2": (0.01, 0.1)})

    def test_bad_bounds_rejected(self):
        trace, scenario = _synthetic(t_end=0.01)
        with pytest.raises(ValueError):
            _problem(trace, scenario, free={"k": (1e5, 1e3)})

    def test_empty_free_set_rejected(self):
        trace, scenario = _synthetic(t_end=0.01)
        with pytest.raises(ValueError):
            FitProblem(trace=trace, scenario=scenario, free={})


class TestObjective:
    def test_zero_at_truth_without_noise(self):
        trace, scenario = _synthetic(t_end=0.06)
        problem = _problem(trace, scenario)
        assert objective([TRUTH.k, TRUTH.alpha], problem) == pytest.approx(0.0, abs=1e-15)

    def test_positive_away_from_truth(self):
        trace, scenario = _synthetic(t_end=0.06)
        problem = _problem(trace, scenario)
        assert objective([3e3, 0.8], problem) > objective([TRUTH.k, TRUTH.alpha], problem)

    def test_out_of_bounds_is_penalized(self):
        trace, scenario = _synthetic(t_end=0.06)
        problem = _problem(trace, scenario)
        cfg = FitConfig()
        assert objective([1e2, 0.3], problem, cfg) == cfg.penalty

    def test_invalid_candidate_is_penalized_not_raised(self):
        trace, scenario = _synthetic(t_end=0.06)
        problem = _problem(trace, scenario, free={"n": (0.0, 2.0)})
        cfg = FitConfig()
        assert objective([0.5], problem, cfg) == cfg.penalty  # n < 1 invalid


class TestFit:
    def test_roundtrip_with_noise(self):
        trace, scenario = _synthetic(noise=0.01)
        problem = _problem(trace, scenario)
        cfg = FitConfig(max_evals=2000, n_starts=3, seed=0)
        result = fit(problem, init={"k": 2.0e4, "alpha": 0.15}, cfg=cfg)
        assert result.n_evals <= 2000
        assert abs(result.params_hat["k"] - TRUTH.k) / TRUTH.k <= 0.10
        assert abs(result.params_hat["alpha"] - TRUTH.alpha) / TRUTH.alpha <= 0.20
        assert result.trace_hat is not None

    def test_never_worse_than_init(self):
        trace, scenario = _synthetic(noise=0.02, seed=7, t_end=0.06)
        problem = _problem(trace, scenario)
        init = {"k": 1.5e4, "alpha": 0.5}
        f_init = objective([init["k"], init["alpha"]], problem)
        result = fit(problem, init, FitConfig(max_evals=60, n_starts=1))
        f_hat = objective([result.params_hat["k"], result.params_hat["alpha"]],
                          problem)
        assert f_hat <= f_init

    def test_budget_is_respected(self):
        trace, scenario = _synthetic(noise=0.01, t_end=0.06)
        problem = _problem(trace, scenario)
        result = fit(problem, init={"k": 2.0e4, "alpha": 0.15},
                     cfg=FitConfig(max_evals=50, n_starts=5))
        # the simplex may finish its current reflection cycle past the cap
        assert result.n_evals <= 50 + 4

    def test_init_outside_bounds_rejected(self):
        trace, scenario = _synthetic(t_end=0.01)
        problem = _problem(trace, scenario)
        with pytest.raises(ValueError):
            fit(problem, init={"k": 1e6, "alpha": 0.3})

    def test_deterministic_given_seed(self):
        trace, scenario = _synthetic(noise=0.01, t_end=0.06)
        problem = _problem(trace, scenario)
        cfg = FitConfig(max_evals=200, n_starts=2, seed=3)
        init = {"k": 2.0e4, "alpha": 0.15}
        r1 = fit(problem, init, cfg)
        r2 = fit(problem, init, cfg)
        assert r1.params_hat == r2.params_hat
        assert r1.n_evals == r2.n_evals


class TestDiagnostics:
    def test_coupled_direction_is_shallower_than_single_moves(self):
        # k and alpha compensate each other: some joint perturbation of both
        # costs less than either parameter moved alone by the same factor
        trace, scenario = _synthetic(t_end=0.06)
        problem = _problem(trace, scenario)
        fac = 1.3
        singles = [objective([TRUTH.k * fac, TRUTH.alpha], problem),
                   objective([TRUTH.k, TRUTH.alpha * fac], problem)]
        joints = [objective([TRUTH.k * fac, TRUTH.alpha * fac], problem),
                  objective([TRUTH.k * fac, TRUTH.alpha / fac], problem)]
        assert min(joints) < min(singles)

    def test_profile_coupling_shape_and_minimum(self):
        trace, scenario = _synthetic(t_end=0.06)
        problem = _problem(trace, scenario)
        k_grid = [5e3, 1e4, 2e4]
        a_grid = [0.1, 0.3, 0.9]
        surface = profile_coupling(problem, k_grid, a_grid)
        assert surface.shape == (3, 3)
        assert np.argmin(surface) == np.ravel_multi_index((1, 1), (3, 3))

    def test_alpha_flat_without_impacts(self):
        # truncate the horizon before the wall is reached: no contact, so
        # the restitution slope cannot be observed
        scenario = idle_impulse(TRUTH, gap=0.02, t_end=0.01)
        traj = simulate(scenario)
        trace = MeasuredTrace(fs=1.0 / traj.dt, t=traj.t.copy(),
                              x2=traj.x2.copy())
        problem = _problem(trace, scenario)
        flat = flat_parameters(problem, init={"k": TRUTH.k, "alpha": TRUTH.alpha})
        assert "alpha" in flat
        assert "k" in flat  # stiffness is equally unobservable pre-contact
