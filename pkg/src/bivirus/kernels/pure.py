"""Pure-NumPy implementation of the hot numerical kernels.

The compiled extension ``bivirus.kernels._native`` provides the same three
entry points (``field``, ``jacobian``, ``integrate``) with identical
semantics; this module is the fallback selected at import time when the
extension is unavailable or explicitly disabled.
"""

import math

import numpy as np

BACKEND = "pure"

# Integrator exit codes (shared contract with the native kernel).
STATUS_CONVERGED = 0
STATUS_MAX_TIME = 1
STATUS_REGION_VIOLATION = 2
STATUS_STEP_UNDERFLOW = 3
STATUS_STEP_BUDGET = 4

# Dormand-Prince 5(4) tableau. Fifth-order propagation, fourth-order
# embedded error estimate, first-same-as-last.
_C2, _C3, _C4, _C5, _C6 = 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 10.0
# PI controller exponents for a 5th-order pair (Hairer's DOPRI5 defaults).
_PI_ALPHA = 0.17
_PI_BETA = 0.04


def field(d1, d2, b1, b2, x):
    """Bivirus vector field at the stacked state x = (x1, x2)."""
    n = d1.shape[0]
    x1 = x[:n]
    x2 = x[n:]
    s = 1.0 - x1 - x2
    out = np.empty(2 * n)
    out[:n] = -d1 * x1 + s * (b1 @ x1)
    out[n:] = -d2 * x2 + s * (b2 @ x2)
    return out


def jacobian(d1, d2, b1, b2, x):
    """Analytic Jacobian of the bivirus field at the stacked state."""
    n = d1.shape[0]
    x1 = x[:n]
    x2 = x[n:]
    s = 1.0 - x1 - x2
    p1 = b1 @ x1
    p2 = b2 @ x2
    jac = np.empty((2 * n, 2 * n))
    jac[:n, :n] = s[:, None] * b1
    jac[:n, :n] -= np.diag(d1 + p1)
    jac[:n, n:] = -np.diag(p1)
    jac[n:, :n] = -np.diag(p2)
    jac[n:, n:] = s[:, None] * b2
    jac[n:, n:] -= np.diag(d2 + p2)
    return jac


def _region_violation(y, n):
    v = max(0.0, float(np.max(-y)), float(np.max(y - 1.0)))
    return max(v, float(np.max(y[:n] + y[n:] - 1.0)))


def _target_hit(y, fnorm_inf, targets, prox_tol, field_tol):
    if targets.shape[0] == 0 or fnorm_inf > field_tol:
        return -1
    dists = np.max(np.abs(targets - y[None, :]), axis=1)
    hit = int(np.argmin(dists))
    return hit if dists[hit] <= prox_tol else -1


def _initial_step(f0, y0, t_max, rtol, atol):
    # Hairer's starting-step heuristic followed by one Euler probe.
    scale = atol + rtol * np.abs(y0)
    d0 = math.sqrt(float(np.mean((y0 / scale) ** 2)))
    d1 = math.sqrt(float(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d1 < 1e-10 or d0 < 1e-10 else 0.01 * d0 / d1
    return min(h0, t_max)


def integrate(
    d1,
    d2,
    b1,
    b2,
    x0,
    t_max,
    rtol,
    atol,
    targets,
    prox_tol,
    field_tol,
    violation_cap,
    record,
    max_steps,
):
    """Adaptive RK 5(4) trajectory of the bivirus field.

    Returns ``(status, t, y, target_index, max_violation, n_accepted,
    times, states)`` where times/states are None unless ``record``.
    Early termination when an accepted state is within ``prox_tol``
    (inf-norm) of a row of ``targets`` and the field inf-norm is at most
    ``field_tol``. Region violations are monitored, never corrected.
    """
    n = d1.shape[0]
    y = np.asarray(x0, dtype=float).copy()
    t = 0.0
    f = field(d1, d2, b1, b2, y)
    max_viol = _region_violation(y, n)
    times = [0.0] if record else None
    states = [y.copy()] if record else None

    def _result(status, target=-1, nacc=0):
        ts = np.array(times) if record else None
        ys = np.array(states) if record else None
        return status, t, y, target, max_viol, nacc, ts, ys

    if max_viol > violation_cap:
        return _result(STATUS_REGION_VIOLATION)
    hit = _target_hit(y, float(np.max(np.abs(f))), targets, prox_tol, field_tol)
    if hit >= 0:
        return _result(STATUS_CONVERGED, target=hit)

    h = _initial_step(f, y, t_max, rtol, atol)
    err_old = 1e-4
    just_rejected = False
    nacc = 0
    nsteps = 0

    while t < t_max:
        if h < 1e-13 * max(1.0, t):
            return _result(STATUS_STEP_UNDERFLOW, nacc=nacc)
        if nsteps >= max_steps:
            return _result(STATUS_STEP_BUDGET, nacc=nacc)
        h = min(h, t_max - t)
        nsteps += 1

        k1 = f
        k2 = field(d1, d2, b1, b2, y + h * (_A21 * k1))
        k3 = field(d1, d2, b1, b2, y + h * (_A31 * k1 + _A32 * k2))
        k4 = field(d1, d2, b1, b2, y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = field(
            d1, d2, b1, b2, y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4)
        )
        k6 = field(
            d1,
            d2,
            b1,
            b2,
            y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5),
        )
        ynew = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = field(d1, d2, b1, b2, ynew)
        err_vec = h * (
            _E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7
        )
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(ynew))
        err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))

        if err <= 1.0:
            t += h
            y = ynew
            f = k7
            nacc += 1
            max_viol = max(max_viol, _region_violation(y, n))
            if record:
                times.append(t)
                states.append(y.copy())
            if max_viol > violation_cap:
                return _result(STATUS_REGION_VIOLATION, nacc=nacc)
            hit = _target_hit(
                y, float(np.max(np.abs(k7))), targets, prox_tol, field_tol
            )
            if hit >= 0:
                return _result(STATUS_CONVERGED, target=hit, nacc=nacc)
            if err == 0.0:
                fac = _FAC_MAX
            else:
                fac = _SAFETY * err ** -_PI_ALPHA * err_old**_PI_BETA
                fac = min(_FAC_MAX, max(_FAC_MIN, fac))
            if just_rejected:
                fac = min(fac, 1.0)
            err_old = max(err, 1e-4)
            just_rejected = False
            h *= fac
        else:
            just_rejected = True
            h *= min(0.9, max(_FAC_MIN, _SAFETY * err**-0.2))

    return _result(STATUS_MAX_TIME, nacc=nacc)
