"""Pure-Python backend for the hybrid fixed-step RK4 event loop.

This is the reference implementation of the hot kernel; ``_kernel.pyx``
is a line-for-line compiled port selected at import time by ``sim``.
Everything here works on plain floats so the two backends stay trivially
comparable.

Mode encoding (matches model.Mode): 0 SlipFree, 1 StickFree,
2 SlipContact, 3 StickContact. Event encoding (matches model.EventKind):
0 Impact, 1 Separation, 2 StickOnset, 3 SlipOnset. Events are returned as
tuples (kind, t_event, x2, v2, mode_after, v_in).
"""

from __future__ import annotations

import math

from .model import ChatteringError, NumericsError

SLIP_FREE, STICK_FREE, SLIP_CONTACT, STICK_CONTACT = 0, 1, 2, 3
IMPACT, SEPARATION, STICK_ONSET, SLIP_ONSET = 0, 1, 2, 3


def _force_clamped(x2, v2, k, alpha, n, x_c):
    p = x2 - x_c
    if p <= 0.0:
        return 0.0
    raw = k * p ** n * (1.0 + 1.5 * alpha * v2)
    return raw if raw > 0.0 else 0.0


def _accel(x2, v2, mode, s, vp, m2, b, k, alpha, n, x_c):
    if mode == STICK_FREE or mode == STICK_CONTACT:
        return 0.0
    a = b * s / m2
    if mode == SLIP_CONTACT:
        a -= _force_clamped(x2, v2, k, alpha, n, x_c) / m2
    return a


def _rk4(x2, v2, h, mode, s, vp, m2, b, k, alpha, n, x_c):
    if mode == STICK_FREE or mode == STICK_CONTACT:
        return x2 + vp * h, vp
    k1x = v2
    k1v = _accel(x2, v2, mode, s, vp, m2, b, k, alpha, n, x_c)
    k2x = v2 + 0.5 * h * k1v
    k2v = _accel(x2 + 0.5 * h * k1x, v2 + 0.5 * h * k1v, mode, s, vp, m2, b, k, alpha, n, x_c)
    k3x = v2 + 0.5 * h * k2v
    k3v = _accel(x2 + 0.5 * h * k2x, v2 + 0.5 * h * k2v, mode, s, vp, m2, b, k, alpha, n, x_c)
    k4x = v2 + h * k3v
    k4v = _accel(x2 + h * k3x, v2 + h * k3v, mode, s, vp, m2, b, k, alpha, n, x_c)
    return (x2 + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            v2 + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v))


def _slip_sign(v2, mode, x2, vp, k, alpha, n, x_c):
    dz = vp - v2
    if dz > 0.0:
        return 1
    if dz < 0.0:
        return -1
    # Exactly zero relative velocity in a slip mode: incipient direction is
    # set by the contact push (the disk falls behind the platform).
    if mode == SLIP_CONTACT and _force_clamped(x2, v2, k, alpha, n, x_c) > 0.0:
        return 1
    return 0


def _g_contact(x2, v2, alpha, x_c):
    """Positive iff the Hunt-Crossley force is active (overlap and no
    fast-withdrawal clamp)."""
    g1 = x2 - x_c
    g2 = 1.0 + 1.5 * alpha * v2
    return g1 if g1 < g2 else g2


def _g_slipon(x2, vp, b, k, alpha, n, x_c):
    return b - _force_clamped(x2, vp, k, alpha, n, x_c)


def _guard(gid, x2, v2, vp, b, k, alpha, n, x_c):
    if gid == IMPACT or gid == SEPARATION:
        return _g_contact(x2, v2, alpha, x_c)
    if gid == STICK_ONSET:
        return vp - v2
    return _g_slipon(x2, vp, b, k, alpha, n, x_c)


def _crossed(gid, g0, g):
    if gid == IMPACT:
        return g > 0.0
    if gid == SEPARATION or gid == SLIP_ONSET:
        return g <= 0.0
    # Stick onset: any strict sign change of the relative velocity.
    return g == 0.0 or (g0 > 0.0) != (g > 0.0)


def _active_guards(mode):
    if mode == SLIP_FREE:
        return (IMPACT, STICK_ONSET)
    if mode == STICK_FREE:
        return (IMPACT,)
    if mode == SLIP_CONTACT:
        return (SEPARATION, STICK_ONSET)
    return (SEPARATION, SLIP_ONSET)


def _triggered(gid, g0, g1):
    if gid == IMPACT:
        return g0 <= 0.0 < g1
    if gid == SEPARATION or gid == SLIP_ONSET:
        return g0 > 0.0 >= g1
    return (g0 > 0.0 and g1 <= 0.0) or (g0 < 0.0 and g1 >= 0.0)


def run_sim(
    x1_0, x2_0, v2_0, mode0, vp,
    m2, b, k, alpha, n, x_c,
    dt, n_steps, sample_every,
    tol_event, eps_v, max_events,
    t_arr, x1_arr, x2_arr, v2_arr, p_arr, f_arr, mode_arr,
):
    """Run the hybrid event loop, filling the preallocated sample arrays.

    Returns the list of event tuples. Arrays must have length
    n_steps // sample_every + 1.
    """
    x2 = x2_0
    v2 = v2_0
    mode = mode0
    events = []

    def record(j, t):
        t_arr[j] = t
        x1_arr[j] = x1_0 + vp * t
        x2_arr[j] = x2
        v2_arr[j] = v2
        pp = x2 - x_c
        p_arr[j] = pp if pp > 0.0 else 0.0
        f_arr[j] = (_force_clamped(x2, v2, k, alpha, n, x_c)
                    if (mode == SLIP_CONTACT or mode == STICK_CONTACT) else 0.0)
        mode_arr[j] = mode

    record(0, 0.0)
    for i in range(n_steps):
        t0 = i * dt
        t_local = 0.0
        n_ev = 0
        while dt - t_local > 1e-15 * dt:
            # Instant events: the state can sit on the wrong side of a guard
            # at a sub-step start (off-manifold initial conditions, clamp
            # states); resolve the mode before integrating.
            g_now = _g_contact(x2, v2, alpha, x_c)
            inst = -1
            if (mode == SLIP_CONTACT or mode == STICK_CONTACT) and g_now <= 0.0:
                inst = SEPARATION
            elif (mode == SLIP_FREE or mode == STICK_FREE) and g_now > 0.0:
                inst = IMPACT
            elif mode == STICK_CONTACT and _g_slipon(x2, vp, b, k, alpha, n, x_c) <= 0.0:
                inst = SLIP_ONSET
            if inst >= 0:
                t_e = t0 + t_local
                v_in = -1.0
                if inst == IMPACT:
                    v_in = abs(v2)
                    mode = STICK_CONTACT if mode == STICK_FREE else SLIP_CONTACT
                elif inst == SEPARATION:
                    if abs(vp - v2) <= eps_v:
                        mode = STICK_FREE
                        v2 = vp
                    else:
                        mode = SLIP_FREE
                else:
                    mode = SLIP_CONTACT
                events.append((inst, t_e, x2, v2, mode, v_in))
                n_ev += 1
                if n_ev > max_events:
                    raise ChatteringError(
                        f"more than {max_events} events within one base step "
                        f"at t={t_e:.6g}"
                    )
                continue
            h = dt - t_local
            s = _slip_sign(v2, mode, x2, vp, k, alpha, n, x_c)
            guards = _active_guards(mode)
            g0s = [_guard(g, x2, v2, vp, b, k, alpha, n, x_c) for g in guards]
            x2_t, v2_t = _rk4(x2, v2, h, mode, s, vp, m2, b, k, alpha, n, x_c)
            best_gid = -1
            best_tau = h
            best_state = (x2_t, v2_t)
            for gid, g0 in zip(guards, g0s):
                g1 = _guard(gid, x2_t, v2_t, vp, b, k, alpha, n, x_c)
                if not _triggered(gid, g0, g1):
                    continue
                lo = 0.0
                hi = h
                xh, vh = x2_t, v2_t
                while hi - lo > tol_event:
                    mid = 0.5 * (lo + hi)
                    xm, vm = _rk4(x2, v2, mid, mode, s, vp, m2, b, k, alpha, n, x_c)
                    gm = _guard(gid, xm, vm, vp, b, k, alpha, n, x_c)
                    if _crossed(gid, g0, gm):
                        hi = mid
                        xh, vh = xm, vm
                    else:
                        lo = mid
                if hi < best_tau - tol_event or (
                    hi < best_tau + tol_event and (best_gid < 0 or gid < best_gid)
                ):
                    best_gid = gid
                    best_tau = hi
                    best_state = (xh, vh)
            if best_gid < 0:
                x2, v2 = x2_t, v2_t
                t_local = dt
                break
            # Advance to (just past) the crossing and apply the transition.
            x2, v2 = best_state
            t_local += best_tau
            t_e = t0 + t_local
            v_in = -1.0
            rec = True
            if best_gid == IMPACT:
                v_in = abs(v2)
                mode = STICK_CONTACT if mode == STICK_FREE else SLIP_CONTACT
            elif best_gid == SEPARATION:
                if abs(vp - v2) <= eps_v:
                    mode = STICK_FREE
                    v2 = vp
                else:
                    mode = SLIP_FREE
            elif best_gid == STICK_ONSET:
                f_req = (_force_clamped(x2, vp, k, alpha, n, x_c)
                         if mode == SLIP_CONTACT else 0.0)
                if f_req <= b:
                    v2 = vp
                    mode = STICK_CONTACT if mode == SLIP_CONTACT else STICK_FREE
                else:
                    # Relative velocity reverses without sticking; stay in
                    # slip, direction re-derived next sub-step.
                    rec = False
            else:  # SLIP_ONSET
                mode = SLIP_CONTACT
            if rec:
                events.append((best_gid, t_e, x2, v2, mode, v_in))
            n_ev += 1
            if n_ev > max_events:
                raise ChatteringError(
                    f"more than {max_events} events within one base step at t={t_e:.6g}"
                )
        if not (math.isfinite(x2) and math.isfinite(v2)):
            raise NumericsError(f"non-finite state at t={(i + 1) * dt:.6g}")
        if (i + 1) % sample_every == 0:
            record((i + 1) // sample_every, (i + 1) * dt)
    return events
