"""Coulomb friction coupling between the active and passive bodies.

Implements the full feedback-coupled pair accelerations, the stiction
condition with its breakaway rule, and the reduced passive-body
acceleration used when the active subsystem is robustly controlled
(platform trajectory imposed, friction not propagated back).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from .model import (
    DEFAULT_EPS_V,
    SimState,
    SystemParams,
    sgn,
    sgn_banded,
    validate,
)


@dataclass(frozen=True)
class CouplingMode:
    """How the active body is driven.

    With ``robust=True`` the active-body acceleration is the prescribed
    profile ``accel_profile(t)`` and the friction reaction is not fed back;
    otherwise the full feedback-coupled dynamics apply.
    """

    robust: bool = False
    accel_profile: Optional[Callable[[float], float]] = None

    def active_acceleration(self, t: float) -> float:
        if not self.robust:
            raise ValueError("active_acceleration is only defined for the "
                             "robustly controlled mode")
        if self.accel_profile is None:
            raise ValueError("robust coupling requires an acceleration profile")
        return self.accel_profile(t)


def stiction_holds(required_accel: float, params: SystemParams) -> bool:
    """True iff Coulomb stiction can supply the required common acceleration.

    The boundary |accel| == b/m2 is resolved as "holds" (continuity from
    the stick side).
    """
    return abs(required_accel) <= params.b / params.m2


def coupled_accelerations(
    state: SimState,
    params: SystemParams,
    u: float,
    eps_v: float = DEFAULT_EPS_V,
) -> Tuple[float, float]:
    """Accelerations (a1, a2) of the feedback-coupled pair.

    In slip (relative velocity outside the stick band) the bodies exchange
    only the kinetic Coulomb force b*sgn(v1 - v2). In stick they move as a
    single rigid body of mass m1 + m2 as long as stiction can carry the
    common acceleration; otherwise breakaway occurs and the slip branch
    applies with the sign of the incipient relative acceleration.
    """
    violations = validate(params)
    if violations:
        raise ValueError(f"invalid params: {violations}")
    dz = state.v1 - state.v2
    drive = u - params.a1 * state.v1 - params.a2 * state.x1
    s = sgn_banded(dz, eps_v)
    if s != 0:
        a1 = (drive - params.b * s) / params.m1
        a2 = params.b * s / params.m2
        return a1, a2
    # Stick branch: common acceleration of the rigid pair.
    a_stick = drive / (params.m1 + params.m2)
    if stiction_holds(a_stick, params):
        return a_stick, a_stick
    # Breakaway: friction saturates; the incipient relative acceleration
    # is driven by the unbalanced platform force.
    s = sgn(drive / params.m1)
    a1 = (drive - params.b * s) / params.m1
    a2 = params.b * s / params.m2
    return a1, a2


def passive_acceleration(
    state: SimState,
    params: SystemParams,
    contact_force: float,
    eps_v: float = DEFAULT_EPS_V,
) -> float:
    """Passive-body acceleration under robust platform control.

    Force balance on the disk: m2*a2 = b*sgn(v1 - v2) - f. Inside the stick
    band with zero contact force the disk follows the platform (constant
    velocity, zero acceleration); a contact force exceeding the stiction
    limit b breaks the disk away against the push.
    """
    if contact_force < 0.0:
        raise ValueError(f"contact_force must be >= 0, got {contact_force!r}")
    s = sgn_banded(state.v1 - state.v2, eps_v)
    if s != 0:
        return (params.b * s - contact_force) / params.m2
    if contact_force <= params.b:
        # Stiction carries the contact push; disk rides the constant-velocity
        # platform with zero acceleration.
        return 0.0
    # Breakaway: the disk is pushed back, slipping with v2 falling below v1.
    return (params.b - contact_force) / params.m2
