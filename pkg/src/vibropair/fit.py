"""Derivative-free identification of contact/friction parameters from a
measured (or synthetic) position trace.

The objective simulates the scenario with candidate parameters and scores
the weighted RMS mismatch against the trace. Event times make it
piecewise-smooth at best, so the search is a bounded Nelder-Mead simplex
with optional seeded multi-start; gradients are never used.

Identifiability caveat: alpha and k enter the contact damping only through
their product, so the objective has a shallow valley along that coupling.
``profile_coupling`` makes the valley visible on a grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize as _optimize

from .model import SimulationError, Trajectory
from .sim import IntegratorConfig, Scenario, simulate
from .signal_io import MeasuredTrace, differentiate

#: Fittable SystemParams fields.
FITTABLE = ("k", "alpha", "x_c", "b", "n")

#: Default half-width of the x_c search window [m]; the touching point is
#: known to be noise-sensitive, so it is fitted near a user estimate only.
XC_WINDOW = 1e-3


@dataclass(frozen=True)
class FitConfig:
    max_evals: int = 2000
    n_starts: int = 5
    seed: int = 0
    xatol: float = 1e-6    # simplex diameter in unit-box coordinates
    fatol: float = 1e-12
    penalty: float = 1e6   # objective value for failed simulations


@dataclass(frozen=True)
class FitProblem:
    trace: MeasuredTrace
    scenario: Scenario
    free: Dict[str, Tuple[float, float]]
    velocity_weight: float = 0.0
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self):
        if not self.free:
            raise ValueError("at least one free parameter is required")
        for name, (lo, hi) in self.free.items():
            if name not in FITTABLE:
                raise ValueError(f"unknown fit parameter {name!r}; "
                                 f"allowed: {FITTABLE}")
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"bounds for {name!r} must be finite and "
                                 f"ordered, got ({lo!r}, {hi!r})")

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(self.free)


@dataclass
class FitResult:
    params_hat: Dict[str, float]
    rmse: float
    n_evals: int
    converged: bool
    trace_hat: Optional[Trajectory] = None


def _scenario_with(problem: FitProblem, values: Dict[str, float]) -> Scenario:
    params = problem.scenario.params.replace(**values)
    return replace(problem.scenario, params=params)


def _candidate_dict(problem: FitProblem, candidate: Sequence[float]) -> Dict[str, float]:
    names = problem.names
    if len(candidate) != len(names):
        raise ValueError(f"candidate has {len(candidate)} entries for "
                         f"{len(names)} free parameters")
    return {name: float(v) for name, v in zip(names, candidate)}


def objective(candidate: Sequence[float], problem: FitProblem,
              cfg: Optional[FitConfig] = None) -> float:
    """Weighted RMS mismatch of the simulated x2 against the trace.

    Failed simulations (chattering, non-finite states, invalid parameters)
    return a large finite penalty instead of raising.
    """
    cfg = cfg or FitConfig()
    values = _candidate_dict(problem, candidate)
    for name, v in values.items():
        lo, hi = problem.free[name]
        if not (lo <= v <= hi):
            return cfg.penalty
    try:
        traj = simulate(_scenario_with(problem, values), problem.integrator)
    except (SimulationError, ValueError):
        return cfg.penalty
    if len(traj) < 2:
        return cfg.penalty
    x2_hat = np.interp(problem.trace.t, traj.t, traj.x2)
    mse = float(np.mean((x2_hat - problem.trace.x2) ** 2))
    if problem.velocity_weight > 0.0:
        v_meas = differentiate(problem.trace.x2, problem.trace.fs)
        v_hat = differentiate(x2_hat, problem.trace.fs)
        mse += problem.velocity_weight * float(np.mean((v_hat - v_meas) ** 2))
    if not np.isfinite(mse):
        return cfg.penalty
    return np.sqrt(mse)


def fit(problem: FitProblem, init: Dict[str, float],
        cfg: Optional[FitConfig] = None) -> FitResult:
    """Bounded Nelder-Mead descent from ``init``, with seeded multi-start.

    The search runs in unit-box coordinates so the simplex tolerance is
    scale-free across parameters. Never returns a point worse than the
    initialization; exhausting the evaluation budget clears ``converged``
    but is not an error.
    """
    cfg = cfg or FitConfig()
    names = problem.names
    lo = np.array([problem.free[name][0] for name in names])
    hi = np.array([problem.free[name][1] for name in names])
    span = hi - lo
    x0 = np.array([init[name] for name in names], dtype=float)
    if np.any(x0 < lo) or np.any(x0 > hi):
        raise ValueError("init must lie within the bounds")

    n_evals = 0
    best_y = None
    best_f = np.inf

    def scored(y):
        nonlocal n_evals, best_y, best_f
        y = np.clip(y, 0.0, 1.0)
        n_evals += 1
        value = objective(lo + span * y, problem, cfg)
        if value < best_f:
            best_f = value
            best_y = y.copy()
        return value

    rng = np.random.default_rng(cfg.seed)
    starts = [(x0 - lo) / span]
    for _ in range(max(0, cfg.n_starts - 1)):
        starts.append(rng.uniform(0.0, 1.0, size=len(names)))

    converged = False
    for y_start in starts:
        budget = cfg.max_evals - n_evals
        if budget <= len(names) + 1:
            break
        res = _optimize.minimize(
            scored, y_start, method="Nelder-Mead",
            bounds=[(0.0, 1.0)] * len(names),
            options=dict(maxfev=budget, xatol=cfg.xatol, fatol=cfg.fatol),
        )
        if res.fun <= best_f:  # this start produced the incumbent best
            converged = bool(res.success)

    params_hat = _candidate_dict(problem, lo + span * best_y)
    try:
        trace_hat = simulate(_scenario_with(problem, params_hat),
                             problem.integrator)
    except (SimulationError, ValueError):
        trace_hat = None
    # Report the pure position RMSE at the optimum.
    rmse = _position_rmse(problem, params_hat, cfg)
    return FitResult(params_hat=params_hat, rmse=rmse, n_evals=n_evals,
                     converged=converged, trace_hat=trace_hat)


def _position_rmse(problem: FitProblem, values: Dict[str, float],
                   cfg: FitConfig) -> float:
    try:
        traj = simulate(_scenario_with(problem, values), problem.integrator)
    except (SimulationError, ValueError):
        return cfg.penalty
    if len(traj) < 2:
        return cfg.penalty
    x2_hat = np.interp(problem.trace.t, traj.t, traj.x2)
    return float(np.sqrt(np.mean((x2_hat - problem.trace.x2) ** 2)))


def profile_coupling(problem: FitProblem, k_grid: Sequence[float],
                     alpha_grid: Sequence[float],
                     cfg: Optional[FitConfig] = None) -> np.ndarray:
    """Objective surface over a (k, alpha) grid, other parameters fixed at
    the scenario template values. Shape (len(k_grid), len(alpha_grid))."""
    cfg = cfg or FitConfig()
    surface = np.empty((len(k_grid), len(alpha_grid)))
    for i, k in enumerate(k_grid):
        for j, a in enumerate(alpha_grid):
            values = {"k": float(k), "alpha": float(a)}
            try:
                traj = simulate(_scenario_with(problem, values),
                                problem.integrator)
                x2_hat = np.interp(problem.trace.t, traj.t, traj.x2)
                surface[i, j] = np.sqrt(np.mean((x2_hat - problem.trace.x2) ** 2))
            except (SimulationError, ValueError):
                surface[i, j] = cfg.penalty
    return surface


def flat_parameters(problem: FitProblem, init: Dict[str, float],
                    rel_step: float = 0.5, tol: float = 1e-12,
                    cfg: Optional[FitConfig] = None) -> list:
    """Names of free parameters the objective is insensitive to at ``init``.

    Cheap identifiability probe: perturb each free parameter by
    ``rel_step`` of its bound span (clipped to the bounds) and flag it
    when the objective does not move. A trace without impact events, for
    instance, leaves alpha flat.
    """
    cfg = cfg or FitConfig()
    base = np.array([init[name] for name in problem.names])
    f0 = objective(base, problem, cfg)
    flat = []
    for idx, name in enumerate(problem.names):
        lo, hi = problem.free[name]
        moved = base.copy()
        delta = rel_step * (hi - lo)
        moved[idx] = min(hi, base[idx] + delta)
        if moved[idx] == base[idx]:
            moved[idx] = max(lo, base[idx] - delta)
        if abs(objective(moved, problem, cfg) - f0) <= tol:
            flat.append(name)
    return flat
