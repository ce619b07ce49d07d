"""Shared domain types and constants for the active-passive pair model.

Everything downstream (friction coupling, contact law, hybrid simulator,
identification) works in terms of the value types defined here. All types
are immutable and all functions are pure, so they can be shared freely
between concurrent parameter-sweep workers.

Units are SI throughout: m, s, kg, N.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

import numpy as np

#: Default gravitational acceleration [m/s^2].
G_DEFAULT = 9.81

#: Default measurement sample rate [Hz] (5 kHz acquisition board).
DEFAULT_SAMPLE_RATE = 5000.0

#: Default stick velocity band [m/s].
DEFAULT_EPS_V = 1e-4

#: Default event localization width [s].
DEFAULT_TOL_EVENT = 1e-9


class SimulationError(RuntimeError):
    """Base class for runtime failures of the hybrid simulator."""


class ChatteringError(SimulationError):
    """Raised when the per-step event cap is exceeded (mode chattering)."""


class NumericsError(SimulationError):
    """Raised when the integrated state becomes non-finite."""


class Mode(enum.IntEnum):
    """Discrete mode of the passive body: stick/slip x free/contact."""

    SLIP_FREE = 0
    STICK_FREE = 1
    SLIP_CONTACT = 2
    STICK_CONTACT = 3

    @property
    def in_contact(self) -> bool:
        return self in (Mode.SLIP_CONTACT, Mode.STICK_CONTACT)

    @property
    def sticking(self) -> bool:
        return self in (Mode.STICK_FREE, Mode.STICK_CONTACT)


class EventKind(enum.IntEnum):
    IMPACT = 0
    SEPARATION = 1
    STICK_ONSET = 2
    SLIP_ONSET = 3


def sgn(y: float) -> int:
    """Three-point-valued signum: 1 for y > 0, 0 for y == 0, -1 for y < 0."""
    if not math.isfinite(y):
        raise ValueError(f"sgn requires a finite argument, got {y!r}")
    if y > 0.0:
        return 1
    if y < 0.0:
        return -1
    return 0


def sgn_banded(y: float, eps: float) -> int:
    """Signum with a dead band: 0 whenever |y| <= eps, else sign of y.

    The band boundary is inclusive, which keeps states sitting exactly on
    the edge from chattering between 0 and +/-1.
    """
    if not (eps > 0.0):
        raise ValueError(f"band width must be positive, got {eps!r}")
    if abs(y) <= eps:
        return 0
    return 1 if y > 0.0 else -1


@dataclass(frozen=True)
class SystemParams:
    """Physical and model constants of the active-passive pair.

    The contact damping coefficient is tied to the restitution slope and
    stiffness as lam = 1.5 * alpha * k; it is exposed as a derived property
    and never stored independently.
    """

    m2: float            # passive body mass [kg]
    b: float             # Coulomb friction force [N]
    k: float = 1.0e4     # contact stiffness [N/m^n]
    alpha: float = 1.0   # restitution slope [s/m]
    n: float = 1.0       # contact exponent (1 flat, 3/2 Hertzian sphere)
    x_c: float = 0.0     # impact position of the fixed frame [m]
    v_platform: float = 0.1   # constant platform velocity [m/s]
    m1: float = 1.0      # active body mass [kg]
    a1: float = 0.0      # active-subsystem velocity gain [N*s/m]
    a2: float = 0.0      # active-subsystem position gain [N/m]
    omega_max: float = 2.0    # validity bound on impact speed [m/s]
    g: float = G_DEFAULT      # gravitational acceleration [m/s^2]

    @property
    def lam(self) -> float:
        """Contact damping coefficient, fixed at 1.5 * alpha * k."""
        return 1.5 * self.alpha * self.k

    def validate(self) -> list:
        return validate(self)

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)


def validate(params: SystemParams) -> list:
    """Return every violated SystemParams invariant (empty list if valid)."""
    violations = []
    for name in ("m1", "m2", "b", "k", "alpha", "n", "x_c", "v_platform",
                 "a1", "a2", "omega_max", "g"):
        value = getattr(params, name)
        if not math.isfinite(value):
            violations.append(f"{name} must be finite, got {value!r}")
    for name in ("m1", "m2", "b", "k", "omega_max", "g"):
        if not (getattr(params, name) > 0.0):
            violations.append(f"{name} must be > 0, got {getattr(params, name)!r}")
    if not (params.alpha >= 0.0):
        violations.append(f"alpha must be >= 0, got {params.alpha!r}")
    if not (params.n >= 1.0):
        violations.append(f"n must be >= 1, got {params.n!r}")
    return violations


#: Built-in presets for the two disk samples (steel-on-steel and
#: aluminium-on-steel pairs), with the nominal platform velocity.
_PRESETS = {
    "steel": dict(m2=0.052, b=0.214),
    "aluminium": dict(m2=0.024, b=0.1106),
}


def preset(name: str, **overrides) -> SystemParams:
    """Build a SystemParams from a named preset, with optional overrides."""
    try:
        base = dict(_PRESETS[name])
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {sorted(_PRESETS)}"
        ) from None
    base.update(overrides)
    params = SystemParams(**base)
    violations = validate(params)
    if violations:
        raise ValueError(f"preset {name!r} with overrides is invalid: {violations}")
    return params


def preset_names() -> list:
    return sorted(_PRESETS)


@dataclass(frozen=True)
class SimState:
    """Continuous state of the pair plus the discrete mode."""

    t: float
    x1: float
    v1: float
    x2: float
    v2: float
    mode: Mode

    def replace(self, **changes) -> "SimState":
        return replace(self, **changes)


@dataclass(frozen=True)
class Event:
    """A localized guard crossing."""

    kind: EventKind
    t_event: float
    state_at_event: SimState
    v_in: Optional[float] = None  # pre-impact approach speed, Impact only


@dataclass
class Trajectory:
    """Uniformly sampled simulation output with derived contact signals.

    Column arrays are kept for fast numeric post-processing; ``samples``
    iterates the (SimState, p, f) view required by consumers that want
    per-sample states.
    """

    dt: float
    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    v2: np.ndarray
    p: np.ndarray
    f: np.ndarray
    mode: np.ndarray          # Mode values as int8
    events: list = field(default_factory=list)
    v_platform: float = 0.0

    def __len__(self) -> int:
        return len(self.t)

    def state_at(self, i: int) -> SimState:
        return SimState(
            t=float(self.t[i]),
            x1=float(self.x1[i]),
            v1=self.v_platform,
            x2=float(self.x2[i]),
            v2=float(self.v2[i]),
            mode=Mode(int(self.mode[i])),
        )

    @property
    def samples(self) -> Iterator:
        for i in range(len(self.t)):
            yield self.state_at(i), float(self.p[i]), float(self.f[i])

    def events_of(self, kind: EventKind) -> list:
        return [e for e in self.events if e.kind == kind]
