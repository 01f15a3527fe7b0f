"""Backend parity and integrator behavior of the hot kernels."""

import os
import subprocess
import sys

import numpy as np
import pytest

from bivirus import kernels
from bivirus.kernels import pure


def _params(rng, n):
    d1 = rng.uniform(0.5, 1.5, n)
    d2 = rng.uniform(0.5, 1.5, n)
    b1 = rng.uniform(0.0, 2.0, (n, n))
    b2 = rng.uniform(0.0, 2.0, (n, n))
    return d1, d2, b1, b2


def test_field_and_jacobian_parity():
    rng = np.random.default_rng(7)
    for n in (1, 2, 4, 7):
        d1, d2, b1, b2 = _params(rng, n)
        for _ in range(10):
            x = rng.uniform(-0.1, 1.1, 2 * n)
            f_a = kernels.field(d1, d2, b1, b2, x)
            f_b = pure.field(d1, d2, b1, b2, x)
            np.testing.assert_allclose(f_a, f_b, rtol=0, atol=1e-13)
            j_a = kernels.jacobian(d1, d2, b1, b2, x)
            j_b = pure.jacobian(d1, d2, b1, b2, x)
            np.testing.assert_allclose(j_a, j_b, rtol=0, atol=1e-13)


def test_integrate_parity():
    rng = np.random.default_rng(11)
    n = 3
    d1, d2, b1, b2 = _params(rng, n)
    x0 = np.concatenate([rng.uniform(0, 0.5, n), rng.uniform(0, 0.5, n)])
    args = (20.0, 1e-10, 1e-12, np.zeros((0, 2 * n)), 1e-7, 1e-9, 1e-6, False, 10**6)
    res_a = kernels.integrate(d1, d2, b1, b2, x0, *args)
    res_b = pure.integrate(d1, d2, b1, b2, x0, *args)
    assert res_a[0] == res_b[0]
    assert res_a[3] == res_b[3]
    np.testing.assert_allclose(res_a[2], res_b[2], rtol=0, atol=1e-9)


def test_integrator_accuracy_on_pure_decay():
    # With B = 0 the field is exactly dx/dt = -d x; compare to the closed form.
    n = 3
    d = np.array([0.5, 1.0, 2.0])
    b = np.zeros((n, n))
    x0 = np.concatenate([np.full(n, 0.8), np.zeros(n)])
    status, t, y, _, viol, _, _, _ = kernels.integrate(
        d, d, b, b, x0, 3.0, 1e-10, 1e-12, np.zeros((0, 2 * n)),
        1e-7, 1e-9, 1e-6, False, 10**6,
    )
    assert status == kernels.STATUS_MAX_TIME
    exact = 0.8 * np.exp(-d * 3.0)
    np.testing.assert_allclose(y[:n], exact, rtol=1e-8, atol=1e-12)
    assert viol == 0.0


def test_target_convergence_and_recording():
    # Single node, virus 1 endemic at 0.5; start nearby and detect arrival.
    d = np.array([1.0])
    b1 = np.array([[2.0]])
    b2 = np.array([[0.5]])
    targets = np.array([[0.5, 0.0]])
    status, t, y, hit, _, nacc, times, states = kernels.integrate(
        d, d, b1, b2, np.array([0.9, 0.0]), 500.0, 1e-10, 1e-12, targets,
        1e-7, 1e-9, 1e-6, True, 10**6,
    )
    assert status == kernels.STATUS_CONVERGED
    assert hit == 0
    assert t < 500.0
    assert times.shape[0] == states.shape[0] == nacc + 1
    assert np.all(np.diff(times) > 0)
    assert abs(y[0] - 0.5) <= 1e-7


def test_step_budget_status():
    d = np.array([1.0])
    b = np.array([[2.0]])
    status, *_ = kernels.integrate(
        d, d, b, b, np.array([0.9, 0.05]), 1000.0, 1e-10, 1e-12,
        np.zeros((0, 2)), 1e-7, 1e-9, 1e-6, False, 3,
    )
    assert status == kernels.STATUS_STEP_BUDGET


def test_region_violation_status():
    # A start outside the region trips the violation cap immediately.
    d = np.array([1.0])
    b = np.array([[2.0]])
    status, _, _, _, viol, *_ = kernels.integrate(
        d, d, b, b, np.array([1.2, 0.0]), 10.0, 1e-10, 1e-12,
        np.zeros((0, 2)), 1e-7, 1e-9, 1e-6, False, 10**6,
    )
    assert status == kernels.STATUS_REGION_VIOLATION
    assert viol == pytest.approx(0.2)


def test_backend_selected_and_env_override():
    assert kernels.BACKEND in ("native", "pure")
    env = dict(os.environ, BIVIRUS_FORCE_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "from bivirus import kernels; print(kernels.BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "pure"


@pytest.mark.skipif(kernels.BACKEND != "native", reason="extension not built")
def test_native_backend_active():
    assert kernels.BACKEND == "native"
