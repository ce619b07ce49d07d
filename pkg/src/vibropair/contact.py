"""Hunt-Crossley vibro-impact contact law.

The contact force f = k*p^n*(1 + 1.5*alpha*pdot) vanishes at the instants
of impact and separation (p = 0) for any penetration rate, which is the
distinguishing feature versus linear-damping contact models. Negative raw
force during fast withdrawal (adhesion artifact of the model) is clamped
to zero; separation is declared upstream at the first raw-force zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .model import SystemParams


@dataclass(frozen=True)
class ContactSample:
    p: float      # penetration [m]
    p_dot: float  # penetration rate [m/s]
    f: float      # contact force [N], clamped >= 0


def penetration(x2: float, x_c: float) -> float:
    """Penetration of the passive body beyond the impact position."""
    d = x2 - x_c
    return d if d > 0.0 else 0.0


def contact_force_raw(p: float, p_dot: float, params: SystemParams) -> float:
    """Unclamped Hunt-Crossley force k*p^n + lam*p^n*pdot with lam = 1.5*alpha*k."""
    if p < 0.0:
        raise ValueError(f"penetration must be >= 0, got {p!r}")
    if p == 0.0:
        return 0.0
    return params.k * p ** params.n * (1.0 + 1.5 * params.alpha * p_dot)


def contact_force(p: float, p_dot: float, params: SystemParams) -> float:
    """Contact force, clamped to be non-negative (no adhesion)."""
    raw = contact_force_raw(p, p_dot, params)
    return raw if raw > 0.0 else 0.0


def restitution_coefficient(v_in: float, alpha: float) -> float:
    """Velocity-dependent restitution e = 1 - alpha*v_in, clamped to [0, 1]."""
    if v_in < 0.0:
        raise ValueError(f"approach speed must be >= 0, got {v_in!r}")
    return min(1.0, max(0.0, 1.0 - alpha * v_in))


def hysteresis_trace(
    p_profile: Sequence[float],
    dt: float,
    params: SystemParams,
) -> List[ContactSample]:
    """Evaluate the (p, f) map along a prescribed penetration profile.

    The penetration rate is obtained by central differences (one-sided at
    the ends). Each closed cycle of p returning to zero yields a closed
    loop through (0, 0) since the force vanishes at p = 0.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    p = np.asarray(p_profile, dtype=float)
    if p.size < 2:
        raise ValueError("profile must have at least 2 samples")
    if np.any(p < 0.0):
        raise ValueError("penetration profile must be >= 0 pointwise")
    p_dot = np.gradient(p, dt)
    return [
        ContactSample(float(pi), float(pdi), contact_force(float(pi), float(pdi), params))
        for pi, pdi in zip(p, p_dot)
    ]


def loop_energy(trace: Sequence[ContactSample], closure_tol: float = 1e-9) -> float:
    """Dissipated energy of a closed penetration cycle, as the loop integral
    of f dp by trapezoidal quadrature.

    Raises if the cycle is not closed (start and end penetration differ by
    more than ``closure_tol``).
    """
    if len(trace) < 2:
        raise ValueError("trace must have at least 2 samples")
    p = np.array([s.p for s in trace])
    f = np.array([s.f for s in trace])
    if abs(p[0] - p[-1]) > closure_tol:
        raise ValueError(
            f"penetration cycle is not closed: p[0]={p[0]!r}, p[-1]={p[-1]!r}"
        )
    return float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(p)))


def decaying_cycle_profile(
    amplitude: float = 1e-3,
    freq: float = 5.0,
    decay: float = 1.0,
    n_cycles: int = 4,
    fs: float = 5000.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """Rectified exponentially decaying sinusoid, p >= 0, for hysteresis maps.

    Returns (t, p). Each half-period the profile touches zero, closing a
    loop of the (p, f) map.
    """
    t_end = n_cycles / freq
    t = np.arange(0.0, t_end + 0.5 / fs, 1.0 / fs)
    p = amplitude * np.exp(-decay * t) * np.maximum(np.sin(2.0 * np.pi * freq * t), 0.0)
    # Force exact closure at both ends.
    p[0] = 0.0
    p[-1] = 0.0
    return t, p
