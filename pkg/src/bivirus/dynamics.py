"""Trajectory integration and basin-of-attraction sampling.

The integrator is an embedded Runge-Kutta 5(4) pair with PI step-size
control (the kernel backend does the stepping). No projection onto the
region of interest is performed: the region is invariant under the exact
flow, so any violation beyond a small guard tolerance indicates an
integrator bug and raises instead of being corrected.

Convergence to an equilibrium is declared only when the state is close
to a known atlas equilibrium AND the field norm is tiny; the field norm
alone would misfire during slow saddle passages.
"""

from __future__ import annotations

import csv
import enum
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .equilibria import EquilibriumAtlas
from .errors import IntegrationError, PreconditionError, StiffnessError
from .model import REGION_TOL, BivirusModel, State, VirusParams, region_violation
from .singlevirus import Regime, solve_endemic

logger = logging.getLogger(__name__)

# The convergence detector needs the trajectory error floor (roughly
# rtol * |state| near an attractor) to sit beneath the field threshold
# below; 1e-8/1e-10 would stall a factor ~5 above it.
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
DEFAULT_T_MAX = 2000.0
CONVERGE_PROX = 1e-7
CONVERGE_FIELD = 1e-9
VIOLATION_CAP = 1e-6
MAX_STEPS = 2_000_000


class Terminal(enum.Enum):
    CONVERGED = "converged"
    MAX_TIME = "max-time"


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (len(times), dim) stacked rows; may be endpoint-only
    terminal: Terminal
    converged_to: int | None  # index into the targets passed to integrate
    max_region_violation: float

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True, eq=False)
class BasinSample:
    initial_conditions: list[State]
    attractor_ids: list[int | None]  # atlas indices; None = unresolved
    unresolved: int
    tally: dict[int, int]
    warnings: tuple[str, ...]


def _run_kernel(d1, d2, b1, b2, x0, t_max, rtol, atol, targets, record):
    targets = (
        np.zeros((0, x0.shape[0])) if targets is None else np.asarray(targets, float)
    )
    status, t, y, hit, viol, nacc, times, states = kernels.integrate(
        d1,
        d2,
        b1,
        b2,
        x0,
        t_max,
        rtol,
        atol,
        targets,
        CONVERGE_PROX,
        CONVERGE_FIELD,
        VIOLATION_CAP,
        record,
        MAX_STEPS,
    )
    if status == kernels.STATUS_REGION_VIOLATION:
        raise IntegrationError(
            f"trajectory left the invariant region by {viol:.3e} (> "
            f"{VIOLATION_CAP:.0e}) at t={t:.6g}; the region is invariant under "
            "the exact flow, so this indicates an integrator fault"
        )
    if status == kernels.STATUS_STEP_UNDERFLOW:
        raise StiffnessError(f"step size underflow at t={t:.6g}")
    if status == kernels.STATUS_STEP_BUDGET:
        raise StiffnessError(f"step budget {MAX_STEPS} exhausted at t={t:.6g}")
    if not record:
        times = np.array([t])
        states = y[None, :]
    terminal = (
        Terminal.CONVERGED if status == kernels.STATUS_CONVERGED else Terminal.MAX_TIME
    )
    return Trajectory(
        times=times,
        states=states,
        terminal=terminal,
        converged_to=hit if hit >= 0 else None,
        max_region_violation=float(viol),
    )


def integrate(
    model: BivirusModel,
    s0: State,
    t_max: float = DEFAULT_T_MAX,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    targets=None,
    record: bool = True,
) -> Trajectory:
    """Integrate the bivirus field from s0 for up to t_max time units.

    ``targets`` is an optional (m, 2n) array of equilibrium states; the
    run terminates early with terminal CONVERGED and converged_to set to
    the row index once an accepted state is within CONVERGE_PROX of a row
    and the field norm is below CONVERGE_FIELD.
    """
    if s0.n != model.n:
        raise PreconditionError("initial state dimension does not match the model")
    if region_violation(s0) > REGION_TOL:
        raise PreconditionError(
            f"initial state violates the region of interest by "
            f"{region_violation(s0):.3e}"
        )
    return _run_kernel(
        model.virus1.d,
        model.virus2.d,
        model.virus1.b,
        model.virus2.b,
        s0.stacked(),
        float(t_max),
        rtol,
        atol,
        targets,
        record,
    )


# integrate_single target indices
SINGLE_HEALTHY = 0
SINGLE_ENDEMIC = 1


def integrate_single(
    params: VirusParams,
    x0,
    t_max: float = DEFAULT_T_MAX,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    record: bool = True,
) -> Trajectory:
    """Integrate the single-virus field; the trajectory is n-dimensional.

    Runs the bivirus kernel with the second virus identically zero, which
    reproduces the single-virus dynamics exactly (the zero face is
    algebraically invariant). Convergence targets are the healthy state
    (converged_to == SINGLE_HEALTHY) and, in the endemic regime, the
    endemic equilibrium (converged_to == SINGLE_ENDEMIC).
    """
    x0 = np.asarray(x0, dtype=float)
    n = params.n
    if x0.shape != (n,):
        raise PreconditionError("initial state dimension does not match the params")
    if np.any(x0 < -REGION_TOL) or np.any(x0 > 1 + REGION_TOL):
        raise PreconditionError("initial state must lie in [0, 1]^n")

    targets = [np.zeros(2 * n)]
    res = solve_endemic(params)
    if res.regime is Regime.ENDEMIC:
        targets.append(np.concatenate([res.endemic, np.zeros(n)]))

    traj = _run_kernel(
        params.d,
        params.d,
        params.b,
        params.b,
        np.concatenate([x0, np.zeros(n)]),
        float(t_max),
        rtol,
        atol,
        np.array(targets),
        record,
    )
    return Trajectory(
        times=traj.times,
        states=traj.states[:, :n],
        terminal=traj.terminal,
        converged_to=traj.converged_to,
        max_region_violation=traj.max_region_violation,
    )


def _basin_worker(args):
    (d1, d2, b1, b2, x0, t_max, rtol, atol, targets) = args
    traj = _run_kernel(d1, d2, b1, b2, x0, t_max, rtol, atol, targets, False)
    return traj.converged_to


def basin_sample(
    model: BivirusModel,
    atlas: EquilibriumAtlas,
    count: int,
    rng_seed: int = 42,
    t_max: float = DEFAULT_T_MAX,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    workers: int = 1,
) -> BasinSample:
    """Integrate from uniform random interior states and tally attractors.

    Initial conditions are drawn up front from one seeded generator, so
    the tally is reproducible regardless of worker count. Every resolved
    run must land on a stable atlas equilibrium; landing on a saddle
    raises, since its stable manifold has measure zero.
    """
    n = model.n
    dim = 2 * n
    rng = np.random.default_rng(rng_seed)
    ics = []
    for _ in range(count):
        # rejection sampling per node onto the triangle x1 + x2 < 1
        x1 = np.empty(n)
        x2 = np.empty(n)
        for i in range(n):
            while True:
                u, v = rng.random(), rng.random()
                if u + v < 1.0:
                    x1[i], x2[i] = u, v
                    break
        ics.append(State(x1, x2))

    targets = np.array([eq.state.stacked() for eq in atlas.equilibria])
    stable = {i for i, eq in enumerate(atlas.equilibria) if eq.n_k == dim}

    args = [
        (
            model.virus1.d,
            model.virus2.d,
            model.virus1.b,
            model.virus2.b,
            s.stacked(),
            float(t_max),
            rtol,
            atol,
            targets,
        )
        for s in ics
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = list(pool.map(_basin_worker, args, chunksize=8))
    else:
        hits = [_basin_worker(a) for a in args]

    tally: dict[int, int] = {}
    unresolved = 0
    for hit in hits:
        if hit is None:
            unresolved += 1
            continue
        if hit not in stable:
            raise IntegrationError(
                f"trajectory converged to non-stable atlas equilibrium {hit}; "
                "saddle basins have measure zero, so this indicates a missing "
                "attractor or misclassified spectrum"
            )
        tally[hit] = tally.get(hit, 0) + 1

    warnings = []
    if count and unresolved > 0.1 * count:
        msg = (
            f"{unresolved}/{count} basin runs unresolved at t_max={t_max:g}; "
            "a stable equilibrium may be missing from the atlas or the "
            "spectrum is near-degenerate"
        )
        warnings.append(msg)
        logger.warning(msg)
    return BasinSample(
        initial_conditions=ics,
        attractor_ids=hits,
        unresolved=unresolved,
        tally=dict(sorted(tally.items())),
        warnings=tuple(warnings),
    )


def trajectory_to_csv(traj: Trajectory, path, n: int | None = None) -> None:
    """Write one row per accepted step: t, x1_1..x1_n, x2_1..x2_n."""
    dim = traj.states.shape[1]
    if n is None:
        n = dim // 2
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["t"]
        header += [f"x1_{i + 1}" for i in range(n)]
        header += [f"x2_{i + 1}" for i in range(dim - n)]
        writer.writerow(header)
        for t, row in zip(traj.times, traj.states):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in row])
