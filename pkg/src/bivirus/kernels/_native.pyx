"""Compiled implementation of the hot numerical kernels.

Mirrors bivirus.kernels.pure: same entry points, same semantics, same
integrator exit codes. The inner loops are plain C over contiguous
float64 buffers, which is what makes basin sampling and the property
sweeps fast for the small systems this package targets.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "native"

STATUS_CONVERGED = 0
STATUS_MAX_TIME = 1
STATUS_REGION_VIOLATION = 2
STATUS_STEP_UNDERFLOW = 3
STATUS_STEP_BUDGET = 4

cdef double _C2 = 1.0 / 5.0
cdef double _A21 = 1.0 / 5.0
cdef double _A31 = 3.0 / 40.0, _A32 = 9.0 / 40.0
cdef double _A41 = 44.0 / 45.0, _A42 = -56.0 / 15.0, _A43 = 32.0 / 9.0
cdef double _A51 = 19372.0 / 6561.0, _A52 = -25360.0 / 2187.0
cdef double _A53 = 64448.0 / 6561.0, _A54 = -212.0 / 729.0
cdef double _A61 = 9017.0 / 3168.0, _A62 = -355.0 / 33.0
cdef double _A63 = 46732.0 / 5247.0, _A64 = 49.0 / 176.0, _A65 = -5103.0 / 18656.0
cdef double _B1 = 35.0 / 384.0, _B3 = 500.0 / 1113.0, _B4 = 125.0 / 192.0
cdef double _B5 = -2187.0 / 6784.0, _B6 = 11.0 / 84.0
cdef double _E1 = 71.0 / 57600.0, _E3 = -71.0 / 16695.0, _E4 = 71.0 / 1920.0
cdef double _E5 = -17253.0 / 339200.0, _E6 = 22.0 / 525.0, _E7 = -1.0 / 40.0

cdef double _SAFETY = 0.9
cdef double _FAC_MIN = 0.2
cdef double _FAC_MAX = 10.0
cdef double _PI_ALPHA = 0.17
cdef double _PI_BETA = 0.04

from libc.math cimport fabs, pow, sqrt


cdef void _field_c(double[::1] d1, double[::1] d2,
                   double[:, ::1] b1, double[:, ::1] b2,
                   double[::1] x, double[::1] out, int n) noexcept:
    cdef int i, j
    cdef double acc1, acc2, s
    for i in range(n):
        acc1 = 0.0
        acc2 = 0.0
        for j in range(n):
            acc1 += b1[i, j] * x[j]
            acc2 += b2[i, j] * x[n + j]
        s = 1.0 - x[i] - x[n + i]
        out[i] = -d1[i] * x[i] + s * acc1
        out[n + i] = -d2[i] * x[n + i] + s * acc2


def field(d1, d2, b1, b2, x):
    """Bivirus vector field at the stacked state x = (x1, x2)."""
    cdef double[::1] d1v = np.ascontiguousarray(d1, dtype=np.float64)
    cdef double[::1] d2v = np.ascontiguousarray(d2, dtype=np.float64)
    cdef double[:, ::1] b1v = np.ascontiguousarray(b1, dtype=np.float64)
    cdef double[:, ::1] b2v = np.ascontiguousarray(b2, dtype=np.float64)
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef int n = d1v.shape[0]
    out = np.empty(2 * n)
    cdef double[::1] outv = out
    _field_c(d1v, d2v, b1v, b2v, xv, outv, n)
    return out


def jacobian(d1, d2, b1, b2, x):
    """Analytic Jacobian of the bivirus field at the stacked state."""
    cdef double[::1] d1v = np.ascontiguousarray(d1, dtype=np.float64)
    cdef double[::1] d2v = np.ascontiguousarray(d2, dtype=np.float64)
    cdef double[:, ::1] b1v = np.ascontiguousarray(b1, dtype=np.float64)
    cdef double[:, ::1] b2v = np.ascontiguousarray(b2, dtype=np.float64)
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef int n = d1v.shape[0]
    cdef int i, j
    cdef double s, p1, p2
    out = np.zeros((2 * n, 2 * n))
    cdef double[:, ::1] jac = out
    for i in range(n):
        p1 = 0.0
        p2 = 0.0
        for j in range(n):
            p1 += b1v[i, j] * xv[j]
            p2 += b2v[i, j] * xv[n + j]
        s = 1.0 - xv[i] - xv[n + i]
        for j in range(n):
            jac[i, j] = s * b1v[i, j]
            jac[n + i, n + j] = s * b2v[i, j]
        jac[i, i] -= d1v[i] + p1
        jac[i, n + i] = -p1
        jac[n + i, i] = -p2
        jac[n + i, n + i] -= d2v[i] + p2
    return out


cdef double _violation_c(double[::1] y, int n) noexcept:
    cdef double v = 0.0
    cdef int i
    for i in range(2 * n):
        if -y[i] > v:
            v = -y[i]
        if y[i] - 1.0 > v:
            v = y[i] - 1.0
    for i in range(n):
        if y[i] + y[n + i] - 1.0 > v:
            v = y[i] + y[n + i] - 1.0
    return v


cdef double _inf_norm(double[::1] v, int m) noexcept:
    cdef double r = 0.0
    cdef int i
    for i in range(m):
        if fabs(v[i]) > r:
            r = fabs(v[i])
    return r


cdef int _target_hit_c(double[::1] y, double fnorm, double[:, ::1] targets,
                       double prox_tol, double field_tol, int dim) noexcept:
    cdef int k, i, best = -1
    cdef double dist, d, best_dist = 1e300
    if targets.shape[0] == 0 or fnorm > field_tol:
        return -1
    for k in range(targets.shape[0]):
        dist = 0.0
        for i in range(dim):
            d = fabs(targets[k, i] - y[i])
            if d > dist:
                dist = d
        if dist < best_dist:
            best_dist = dist
            best = k
    if best_dist <= prox_tol:
        return best
    return -1


def integrate(d1, d2, b1, b2, x0, double t_max, double rtol, double atol,
              targets, double prox_tol, double field_tol,
              double violation_cap, bint record, long max_steps):
    """Adaptive RK 5(4) trajectory; see bivirus.kernels.pure.integrate."""
    cdef double[::1] d1v = np.ascontiguousarray(d1, dtype=np.float64)
    cdef double[::1] d2v = np.ascontiguousarray(d2, dtype=np.float64)
    cdef double[:, ::1] b1v = np.ascontiguousarray(b1, dtype=np.float64)
    cdef double[:, ::1] b2v = np.ascontiguousarray(b2, dtype=np.float64)
    cdef double[:, ::1] tv = np.ascontiguousarray(
        targets if targets is not None and len(targets) else
        np.zeros((0, len(x0))), dtype=np.float64)
    cdef int n = d1v.shape[0]
    cdef int dim = 2 * n

    y_arr = np.array(x0, dtype=np.float64)
    cdef double[::1] y = y_arr
    f_arr = np.empty(dim)
    ynew_arr = np.empty(dim)
    stage_arr = np.empty(dim)
    k2_arr = np.empty(dim)
    k3_arr = np.empty(dim)
    k4_arr = np.empty(dim)
    k5_arr = np.empty(dim)
    k6_arr = np.empty(dim)
    k7_arr = np.empty(dim)
    cdef double[::1] f = f_arr
    cdef double[::1] ynew = ynew_arr
    cdef double[::1] stage = stage_arr
    cdef double[::1] k2 = k2_arr
    cdef double[::1] k3 = k3_arr
    cdef double[::1] k4 = k4_arr
    cdef double[::1] k5 = k5_arr
    cdef double[::1] k6 = k6_arr
    cdef double[::1] k7 = k7_arr

    cdef double t = 0.0
    cdef double max_viol, h, err, err_old, fac, sc, e, d0, d1n, tmp
    cdef long nacc = 0, nsteps = 0
    cdef int i, hit
    cdef bint just_rejected = False

    # recording buffers (grow by doubling)
    cdef long cap = 1024 if record else 0
    times_buf = np.empty(cap) if record else None
    states_buf = np.empty((cap, dim)) if record else None
    cdef long nrec = 0

    def _record_point(double tt):
        nonlocal times_buf, states_buf, nrec
        if times_buf.shape[0] == nrec:
            times_buf = np.resize(times_buf, 2 * nrec)
            states_buf = np.resize(states_buf, (2 * nrec, dim))
        times_buf[nrec] = tt
        states_buf[nrec] = y_arr
        nrec += 1

    def _result(int status, int target=-1):
        ts = times_buf[:nrec].copy() if record else None
        ys = states_buf[:nrec].copy() if record else None
        return status, t, y_arr, target, max_viol, nacc, ts, ys

    _field_c(d1v, d2v, b1v, b2v, y, f, n)
    max_viol = _violation_c(y, n)
    if record:
        _record_point(0.0)
    if max_viol > violation_cap:
        return _result(STATUS_REGION_VIOLATION)
    hit = _target_hit_c(y, _inf_norm(f, dim), tv, prox_tol, field_tol, dim)
    if hit >= 0:
        return _result(STATUS_CONVERGED, hit)

    # starting step: Hairer's heuristic on scaled norms
    d0 = 0.0
    d1n = 0.0
    for i in range(dim):
        sc = atol + rtol * fabs(y[i])
        d0 += (y[i] / sc) * (y[i] / sc)
        d1n += (f[i] / sc) * (f[i] / sc)
    d0 = sqrt(d0 / dim)
    d1n = sqrt(d1n / dim)
    if d1n < 1e-10 or d0 < 1e-10:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1n
    if h > t_max:
        h = t_max
    err_old = 1e-4

    while t < t_max:
        if h < 1e-13 * (1.0 if t < 1.0 else t):
            return _result(STATUS_STEP_UNDERFLOW)
        if nsteps >= max_steps:
            return _result(STATUS_STEP_BUDGET)
        if h > t_max - t:
            h = t_max - t
        nsteps += 1

        for i in range(dim):
            stage[i] = y[i] + h * _A21 * f[i]
        _field_c(d1v, d2v, b1v, b2v, stage, k2, n)
        for i in range(dim):
            stage[i] = y[i] + h * (_A31 * f[i] + _A32 * k2[i])
        _field_c(d1v, d2v, b1v, b2v, stage, k3, n)
        for i in range(dim):
            stage[i] = y[i] + h * (_A41 * f[i] + _A42 * k2[i] + _A43 * k3[i])
        _field_c(d1v, d2v, b1v, b2v, stage, k4, n)
        for i in range(dim):
            stage[i] = y[i] + h * (_A51 * f[i] + _A52 * k2[i] + _A53 * k3[i]
                                   + _A54 * k4[i])
        _field_c(d1v, d2v, b1v, b2v, stage, k5, n)
        for i in range(dim):
            stage[i] = y[i] + h * (_A61 * f[i] + _A62 * k2[i] + _A63 * k3[i]
                                   + _A64 * k4[i] + _A65 * k5[i])
        _field_c(d1v, d2v, b1v, b2v, stage, k6, n)
        for i in range(dim):
            ynew[i] = y[i] + h * (_B1 * f[i] + _B3 * k3[i] + _B4 * k4[i]
                                  + _B5 * k5[i] + _B6 * k6[i])
        _field_c(d1v, d2v, b1v, b2v, ynew, k7, n)

        err = 0.0
        for i in range(dim):
            e = h * (_E1 * f[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i]
                     + _E6 * k6[i] + _E7 * k7[i])
            tmp = fabs(y[i])
            if fabs(ynew[i]) > tmp:
                tmp = fabs(ynew[i])
            sc = atol + rtol * tmp
            err += (e / sc) * (e / sc)
        err = sqrt(err / dim)

        if err <= 1.0:
            t += h
            for i in range(dim):
                y[i] = ynew[i]
                f[i] = k7[i]
            nacc += 1
            tmp = _violation_c(y, n)
            if tmp > max_viol:
                max_viol = tmp
            if record:
                _record_point(t)
            if max_viol > violation_cap:
                return _result(STATUS_REGION_VIOLATION)
            hit = _target_hit_c(y, _inf_norm(f, dim), tv, prox_tol,
                                field_tol, dim)
            if hit >= 0:
                return _result(STATUS_CONVERGED, hit)
            if err == 0.0:
                fac = _FAC_MAX
            else:
                fac = _SAFETY * pow(err, -_PI_ALPHA) * pow(err_old, _PI_BETA)
                if fac > _FAC_MAX:
                    fac = _FAC_MAX
                elif fac < _FAC_MIN:
                    fac = _FAC_MIN
            if just_rejected and fac > 1.0:
                fac = 1.0
            err_old = err if err > 1e-4 else 1e-4
            just_rejected = False
            h *= fac
        else:
            just_rejected = True
            fac = _SAFETY * pow(err, -0.2)
            if fac > 0.9:
                fac = 0.9
            elif fac < _FAC_MIN:
                fac = _FAC_MIN
            h *= fac

    return _result(STATUS_MAX_TIME)
