#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-NumPy fallback.

Times the three hot entry points (field, jacobian, full adaptive
trajectory) on the example1 model and prints per-call times plus the
speedup. Run after `pip install -e . --no-build-isolation`:

    python3 benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import importlib
import time

import numpy as np


def _load_backends():
    pure = importlib.import_module("bivirus.kernels.pure")
    try:
        native = importlib.import_module("bivirus.kernels._native")
    except ImportError:
        native = None
    return pure, native


def _example1_arrays():
    from bivirus.fixtures import get_fixture

    m = get_fixture("example1")
    return m.virus1.d, m.virus2.d, m.virus1.b, m.virus2.b


def bench_field(mod, args, n_calls=20000):
    d1, d2, b1, b2 = args
    x = np.array([0.1, 0.2, 0.3, 0.15, 0.2, 0.1, 0.05, 0.3])
    t0 = time.perf_counter()
    for _ in range(n_calls):
        mod.field(d1, d2, b1, b2, x)
    return (time.perf_counter() - t0) / n_calls


def bench_jacobian(mod, args, n_calls=20000):
    d1, d2, b1, b2 = args
    x = np.array([0.1, 0.2, 0.3, 0.15, 0.2, 0.1, 0.05, 0.3])
    t0 = time.perf_counter()
    for _ in range(n_calls):
        mod.jacobian(d1, d2, b1, b2, x)
    return (time.perf_counter() - t0) / n_calls


def bench_integrate(mod, args, n_calls=20):
    d1, d2, b1, b2 = args
    rng = np.random.default_rng(42)
    starts = []
    for _ in range(n_calls):
        u = rng.random(4)
        v = rng.random(4)
        over = u + v > 1
        u[over], v[over] = 1 - u[over], 1 - v[over]
        starts.append(np.concatenate([u, v]))
    targets = np.zeros((0, 8))
    t0 = time.perf_counter()
    for x0 in starts:
        mod.integrate(
            d1, d2, b1, b2, x0, 200.0, 1e-10, 1e-12, targets,
            1e-7, 1e-9, 1e-6, False, 10**7,
        )
    return (time.perf_counter() - t0) / n_calls


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args_ns = parser.parse_args()

    pure, native = _load_backends()
    model_args = _example1_arrays()
    benches = [
        ("field (8-dim)", bench_field),
        ("jacobian (8x8)", bench_jacobian),
        ("integrate to t=200", bench_integrate),
    ]

    print(f"{'kernel':22} {'pure':>12} {'native':>12} {'speedup':>9}")
    for name, fn in benches:
        t_pure = min(fn(pure, model_args) for _ in range(args_ns.repeats))
        if native is None:
            print(f"{name:22} {t_pure * 1e6:>10.2f}us {'n/a':>12} {'n/a':>9}")
            continue
        t_native = min(fn(native, model_args) for _ in range(args_ns.repeats))
        print(
            f"{name:22} {t_pure * 1e6:>10.2f}us {t_native * 1e6:>10.2f}us "
            f"{t_pure / t_native:>8.1f}x"
        )
    if native is None:
        print("native extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()
