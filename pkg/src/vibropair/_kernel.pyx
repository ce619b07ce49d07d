# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled port of the hybrid RK4 event loop in ``_purepy``.

Same algorithm, same arithmetic order, same event tuple layout; kept in
lockstep with the pure-Python reference so the two backends agree to
floating-point noise.
"""

from libc.math cimport fabs, isfinite, pow

from .model import ChatteringError, NumericsError

cdef int SLIP_FREE = 0, STICK_FREE = 1, SLIP_CONTACT = 2, STICK_CONTACT = 3
cdef int IMPACT = 0, SEPARATION = 1, STICK_ONSET = 2, SLIP_ONSET = 3


cdef inline double _force_clamped(double x2, double v2, double k,
                                  double alpha, double n, double x_c) nogil:
    cdef double p = x2 - x_c
    cdef double raw
    if p <= 0.0:
        return 0.0
    raw = k * pow(p, n) * (1.0 + 1.5 * alpha * v2)
    return raw if raw > 0.0 else 0.0


cdef inline double _accel(double x2, double v2, int mode, int s, double vp,
                          double m2, double b, double k, double alpha,
                          double n, double x_c) nogil:
    cdef double a
    if mode == STICK_FREE or mode == STICK_CONTACT:
        return 0.0
    a = b * s / m2
    if mode == SLIP_CONTACT:
        a -= _force_clamped(x2, v2, k, alpha, n, x_c) / m2
    return a


cdef inline void _rk4(double x2, double v2, double h, int mode, int s,
                      double vp, double m2, double b, double k, double alpha,
                      double n, double x_c, double *ox, double *ov) nogil:
    cdef double k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v
    if mode == STICK_FREE or mode == STICK_CONTACT:
        ox[0] = x2 + vp * h
        ov[0] = vp
        return
    k1x = v2
    k1v = _accel(x2, v2, mode, s, vp, m2, b, k, alpha, n, x_c)
    k2x = v2 + 0.5 * h * k1v
    k2v = _accel(x2 + 0.5 * h * k1x, v2 + 0.5 * h * k1v, mode, s, vp, m2, b, k, alpha, n, x_c)
    k3x = v2 + 0.5 * h * k2v
    k3v = _accel(x2 + 0.5 * h * k2x, v2 + 0.5 * h * k2v, mode, s, vp, m2, b, k, alpha, n, x_c)
    k4x = v2 + h * k3v
    k4v = _accel(x2 + h * k3x, v2 + h * k3v, mode, s, vp, m2, b, k, alpha, n, x_c)
    ox[0] = x2 + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    ov[0] = v2 + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)


cdef inline int _slip_sign(double v2, int mode, double x2, double vp,
                           double k, double alpha, double n, double x_c) nogil:
    cdef double dz = vp - v2
    if dz > 0.0:
        return 1
    if dz < 0.0:
        return -1
    if mode == SLIP_CONTACT and _force_clamped(x2, v2, k, alpha, n, x_c) > 0.0:
        return 1
    return 0


cdef inline double _guard(int gid, double x2, double v2, double vp, double b,
                          double k, double alpha, double n, double x_c) nogil:
    cdef double g1, g2
    if gid == IMPACT or gid == SEPARATION:
        g1 = x2 - x_c
        g2 = 1.0 + 1.5 * alpha * v2
        return g1 if g1 < g2 else g2
    if gid == STICK_ONSET:
        return vp - v2
    return b - _force_clamped(x2, vp, k, alpha, n, x_c)


cdef inline bint _crossed(int gid, double g0, double g) nogil:
    if gid == IMPACT:
        return g > 0.0
    if gid == SEPARATION or gid == SLIP_ONSET:
        return g <= 0.0
    return g == 0.0 or (g0 > 0.0) != (g > 0.0)


cdef inline bint _triggered(int gid, double g0, double g1) nogil:
    if gid == IMPACT:
        return g0 <= 0.0 and g1 > 0.0
    if gid == SEPARATION or gid == SLIP_ONSET:
        return g0 > 0.0 and g1 <= 0.0
    return (g0 > 0.0 and g1 <= 0.0) or (g0 < 0.0 and g1 >= 0.0)


def run_sim(double x1_0, double x2_0, double v2_0, int mode0, double vp,
            double m2, double b, double k, double alpha, double n, double x_c,
            double dt, long n_steps, long sample_every,
            double tol_event, double eps_v, long max_events,
            double[:] t_arr, double[:] x1_arr, double[:] x2_arr,
            double[:] v2_arr, double[:] p_arr, double[:] f_arr,
            signed char[:] mode_arr):
    """Compiled hybrid event loop; see ``_purepy.run_sim`` for the contract."""
    cdef double x2 = x2_0
    cdef double v2 = v2_0
    cdef int mode = mode0
    cdef long i, j, n_ev
    cdef int s, gid, gi, best_gid, n_guards
    cdef int guards[2]
    cdef double g0s[2]
    cdef double t0, t_local, h, g0, g1, lo, hi, mid
    cdef double x2_t, v2_t, xh, vh, xm, vm, gm
    cdef double best_tau, best_x, best_v
    cdef double t_e, v_in, pp
    cdef bint rec
    events = []

    # sample 0
    t_arr[0] = 0.0
    x1_arr[0] = x1_0
    x2_arr[0] = x2
    v2_arr[0] = v2
    pp = x2 - x_c
    p_arr[0] = pp if pp > 0.0 else 0.0
    f_arr[0] = _force_clamped(x2, v2, k, alpha, n, x_c) if (
        mode == SLIP_CONTACT or mode == STICK_CONTACT) else 0.0
    mode_arr[0] = mode

    for i in range(n_steps):
        t0 = i * dt
        t_local = 0.0
        n_ev = 0
        while dt - t_local > 1e-15 * dt:
            # Instant events: state on the wrong side of a guard at a
            # sub-step start (off-manifold initial conditions, clamp states).
            gm = _guard(IMPACT, x2, v2, vp, b, k, alpha, n, x_c)
            gid = -1
            if (mode == SLIP_CONTACT or mode == STICK_CONTACT) and gm <= 0.0:
                gid = SEPARATION
            elif (mode == SLIP_FREE or mode == STICK_FREE) and gm > 0.0:
                gid = IMPACT
            elif mode == STICK_CONTACT and _guard(
                    SLIP_ONSET, x2, v2, vp, b, k, alpha, n, x_c) <= 0.0:
                gid = SLIP_ONSET
            if gid >= 0:
                t_e = t0 + t_local
                v_in = -1.0
                if gid == IMPACT:
                    v_in = fabs(v2)
                    mode = STICK_CONTACT if mode == STICK_FREE else SLIP_CONTACT
                elif gid == SEPARATION:
                    if fabs(vp - v2) <= eps_v:
                        mode = STICK_FREE
                        v2 = vp
                    else:
                        mode = SLIP_FREE
                else:
                    mode = SLIP_CONTACT
                events.append((gid, t_e, x2, v2, mode, v_in))
                n_ev += 1
                if n_ev > max_events:
                    raise ChatteringError(
                        f"more than {max_events} events within one base step at t={t_e:.6g}"
                    )
                continue
            h = dt - t_local
            s = _slip_sign(v2, mode, x2, vp, k, alpha, n, x_c)
            if mode == SLIP_FREE:
                guards[0] = IMPACT
                guards[1] = STICK_ONSET
                n_guards = 2
            elif mode == STICK_FREE:
                guards[0] = IMPACT
                n_guards = 1
            elif mode == SLIP_CONTACT:
                guards[0] = SEPARATION
                guards[1] = STICK_ONSET
                n_guards = 2
            else:
                guards[0] = SEPARATION
                guards[1] = SLIP_ONSET
                n_guards = 2
            for gi in range(n_guards):
                g0s[gi] = _guard(guards[gi], x2, v2, vp, b, k, alpha, n, x_c)
            _rk4(x2, v2, h, mode, s, vp, m2, b, k, alpha, n, x_c, &x2_t, &v2_t)
            best_gid = -1
            best_tau = h
            best_x = x2_t
            best_v = v2_t
            for gi in range(n_guards):
                gid = guards[gi]
                g0 = g0s[gi]
                g1 = _guard(gid, x2_t, v2_t, vp, b, k, alpha, n, x_c)
                if not _triggered(gid, g0, g1):
                    continue
                lo = 0.0
                hi = h
                xh = x2_t
                vh = v2_t
                while hi - lo > tol_event:
                    mid = 0.5 * (lo + hi)
                    _rk4(x2, v2, mid, mode, s, vp, m2, b, k, alpha, n, x_c, &xm, &vm)
                    gm = _guard(gid, xm, vm, vp, b, k, alpha, n, x_c)
                    if _crossed(gid, g0, gm):
                        hi = mid
                        xh = xm
                        vh = vm
                    else:
                        lo = mid
                if hi < best_tau - tol_event or (
                    hi < best_tau + tol_event and (best_gid < 0 or gid < best_gid)
                ):
                    best_gid = gid
                    best_tau = hi
                    best_x = xh
                    best_v = vh
            if best_gid < 0:
                x2 = x2_t
                v2 = v2_t
                t_local = dt
                break
            x2 = best_x
            v2 = best_v
            t_local += best_tau
            t_e = t0 + t_local
            v_in = -1.0
            rec = True
            if best_gid == IMPACT:
                v_in = fabs(v2)
                mode = STICK_CONTACT if mode == STICK_FREE else SLIP_CONTACT
            elif best_gid == SEPARATION:
                if fabs(vp - v2) <= eps_v:
                    mode = STICK_FREE
                    v2 = vp
                else:
                    mode = SLIP_FREE
            elif best_gid == STICK_ONSET:
                if mode == SLIP_CONTACT and _force_clamped(x2, vp, k, alpha, n, x_c) > b:
                    rec = False
                else:
                    v2 = vp
                    mode = STICK_CONTACT if mode == SLIP_CONTACT else STICK_FREE
            else:
                mode = SLIP_CONTACT
            if rec:
                events.append((best_gid, t_e, x2, v2, mode, v_in))
            n_ev += 1
            if n_ev > max_events:
                raise ChatteringError(
                    f"more than {max_events} events within one base step at t={t_e:.6g}"
                )
        if not (isfinite(x2) and isfinite(v2)):
            raise NumericsError(f"non-finite state at t={(i + 1) * dt:.6g}")
        if (i + 1) % sample_every == 0:
            j = (i + 1) // sample_every
            t_arr[j] = (i + 1) * dt
            x1_arr[j] = x1_0 + vp * ((i + 1) * dt)
            x2_arr[j] = x2
            v2_arr[j] = v2
            pp = x2 - x_c
            p_arr[j] = pp if pp > 0.0 else 0.0
            f_arr[j] = _force_clamped(x2, v2, k, alpha, n, x_c) if (
                mode == SLIP_CONTACT or mode == STICK_CONTACT) else 0.0
            mode_arr[j] = mode
    return events
