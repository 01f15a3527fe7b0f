"""Shared fixtures: example models, their atlases, random model factory."""

import numpy as np
import pytest

from bivirus import fixtures, spectral
from bivirus.equilibria import enumerate_all
from bivirus.model import BivirusModel, VirusParams


@pytest.fixture(scope="session")
def example1():
    return fixtures.get_fixture("example1")


@pytest.fixture(scope="session")
def example2():
    return fixtures.get_fixture("example2")


@pytest.fixture(scope="session")
def atlas1(example1):
    return enumerate_all(example1)


@pytest.fixture(scope="session")
def atlas2(example2):
    return enumerate_all(example2)


def random_virus(rng, n, r_lo=1.3, r_hi=2.5) -> VirusParams:
    """Random strictly positive infection matrix rescaled to R in [r_lo, r_hi]."""
    d = rng.uniform(0.5, 1.5, n)
    b = rng.uniform(0.1, 1.0, (n, n))
    target = rng.uniform(r_lo, r_hi)
    rho = spectral.spectral_radius_nonneg(b / d[:, None])
    return VirusParams(d, b * (target / rho))


def random_model(rng, n, r_lo=1.3, r_hi=2.5) -> BivirusModel:
    """Random model satisfying both standing assumptions."""
    return BivirusModel(random_virus(rng, n, r_lo, r_hi), random_virus(rng, n, r_lo, r_hi))


def random_region_state(rng, n):
    """Uniform point of the region of interest (per-node triangle fold)."""
    u = rng.random(n)
    v = rng.random(n)
    over = u + v > 1.0
    u[over], v[over] = 1.0 - u[over], 1.0 - v[over]
    return u, v


# Equilibrium tables for the built-in examples (4-decimal display values)
# with the expected count of stable Jacobian eigenvalues.

EX1_TABLE = {
    "boundary1": ([0.6157, 0.6157, 0.5652, 0.7160, 0, 0, 0, 0], 8),
    "boundary2": ([0, 0, 0, 0, 0.5652, 0.7160, 0.6157, 0.6157], 8),
    "stable_coex1": (
        [0.0111, 0.0065, 0.5540, 0.7076, 0.5540, 0.7076, 0.0111, 0.0065],
        8,
    ),
    "stable_coex2": (
        [0.6063, 0.6005, 0.0077, 0.0164, 0.0077, 0.0164, 0.6063, 0.6005],
        8,
    ),
    "saddle2": ([0.3478, 0.2662, 0.2298, 0.3899, 0.2298, 0.3899, 0.3478, 0.2662], 6),
    "saddle1a": ([0.3574, 0.2761, 0.0039, 0.0084, 0.2211, 0.3785, 0.6109, 0.6079], 7),
    "saddle1b": ([0.0055, 0.0032, 0.2388, 0.4016, 0.5596, 0.7119, 0.3379, 0.2563], 7),
    "saddle1c": ([0.3379, 0.2563, 0.5596, 0.7119, 0.2388, 0.4016, 0.0055, 0.0032], 7),
    "saddle1d": ([0.6109, 0.6079, 0.2211, 0.3785, 0.0039, 0.0084, 0.3574, 0.2761], 7),
}

EX2_TABLE = {
    "boundary1": ([0.6158, 0.6155, 0.6030, 0.4927, 0, 0, 0, 0], 8),
    "boundary2": ([0, 0, 0, 0, 0.5651, 0.7163, 0.5683, 0.4059], 7),
    "stable_coex": (
        [0.0095, 0.0056, 0.5965, 0.4875, 0.5555, 0.7089, 0.0062, 0.0044],
        8,
    ),
    "saddle": ([0.3391, 0.2576, 0.5998, 0.4901, 0.2376, 0.4001, 0.0031, 0.0022], 7),
}


def match_atlas_entry(atlas, point, tol=1e-3):
    """Closest atlas entry to a reference point; asserts it is within tol."""
    point = np.asarray(point, dtype=float)
    best = min(
        atlas.equilibria,
        key=lambda e: float(np.max(np.abs(e.state.stacked() - point))),
    )
    dist = float(np.max(np.abs(best.state.stacked() - point)))
    assert dist <= tol, f"no atlas entry within {tol} of {point} (closest {dist:.2e})"
    return best


def scalar_oracle_roots(m, grid=1e-3):
    """Brute-force root finder for one-node models.

    Scans the per-node triangle on a uniform grid, Newton-polishes every
    near-zero candidate to 1e-12, dedups, and labels stability from the
    analytic 2x2 Jacobian spectrum. Independent of the search pipeline's
    seeding and continuation machinery.
    """
    from bivirus.model import State
    from bivirus.model import jacobian as model_jacobian

    d1, d2 = m.virus1.d[0], m.virus2.d[0]
    b1, b2 = m.virus1.b[0, 0], m.virus2.b[0, 0]

    def field(x1, x2):
        s = 1.0 - x1 - x2
        return (-d1 + s * b1) * x1, (-d2 + s * b2) * x2

    xs = np.arange(0.0, 1.0 + grid, grid)
    g1, g2 = np.meshgrid(xs, xs, indexing="ij")
    mask = g1 + g2 <= 1.0 + 1e-12
    f1, f2 = field(g1, g2)
    norm = np.maximum(np.abs(f1), np.abs(f2))
    cand_mask = mask & (norm < 5e-3)
    candidates = np.stack([g1[cand_mask], g2[cand_mask]], axis=1)

    roots = []
    for c in candidates:
        x = c.copy()
        for _ in range(100):
            fv = np.array(field(x[0], x[1]))
            if np.max(np.abs(fv)) <= 1e-12:
                break
            jac = model_jacobian(m, State(x[:1], x[1:]))
            try:
                x = x - np.linalg.solve(jac, fv)
            except np.linalg.LinAlgError:
                break
        if np.max(np.abs(field(x[0], x[1]))) > 1e-12:
            continue
        if x[0] < -1e-9 or x[1] < -1e-9 or x[0] + x[1] > 1 + 1e-9:
            continue
        if any(np.max(np.abs(x - r)) <= 1e-6 for r, _ in roots):
            continue
        jac = model_jacobian(m, State(x[:1], x[1:]))
        vals = np.linalg.eigvals(jac)
        roots.append((x, bool(np.all(vals.real < 0))))
    return roots
