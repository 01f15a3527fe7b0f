"""Single-virus SIS solver: regime decision and endemic equilibrium.

For one virus with parameters (D, B) the dynamics are

    dx/dt = [-D + (I - diag(x)) B] x.

If rho(D^-1 B) <= 1 every trajectory converges to the healthy state; if
rho(D^-1 B) > 1 there is exactly one other equilibrium, the endemic
state 0 << xbar << 1, and it attracts everything except the origin.

The solve runs a monotone fixed-point iteration from the all-ones vector
(globally convergent from above for this cooperative system) down to
1e-8, then polishes with Newton to a 1e-12 residual.

An optional restriction vector w replaces B by (I - diag(w)) B, which is
how a boundary equilibrium of the two-virus system reduces to an
effective single-virus problem.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import NonConvergenceError, PreconditionError
from .model import VirusParams

FIXED_POINT_TOL = 1e-8
RESIDUAL_TOL = 1e-12
MAX_ITER = 10_000
# Reproduction numbers within this band of 1 are treated as the healthy
# regime: the endemic state degenerates to the origin there.
R_BOUNDARY_BAND = 1e-10


class Regime(enum.Enum):
    HEALTHY_GLOBAL = "healthy-global"
    ENDEMIC = "endemic"


@dataclass(frozen=True, eq=False)
class SingleVirusResult:
    regime: Regime
    endemic: np.ndarray | None
    reproduction: float
    iterations: int


def single_field(d: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    return -d * x + (1.0 - x) * (b @ x)


def single_jacobian(d: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    return (1.0 - x)[:, None] * b - np.diag(d + b @ x)


def fixed_point_step(params: VirusParams, x) -> np.ndarray:
    """One sweep of the per-node equilibrium map.

    Given incoming infection pressure p_i = (B x)_i, the unique per-node
    balance point is p_i / (d_i + p_i); iterating this from the all-ones
    vector walks monotonically down onto the endemic equilibrium.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > 1):
        raise PreconditionError("iterate must lie in [0, 1]^n")
    p = params.b @ x
    return p / (params.d + p)


def _effective_params(params: VirusParams, restriction) -> VirusParams:
    if restriction is None:
        return params
    w = np.asarray(restriction, dtype=float)
    if w.shape != params.d.shape:
        raise PreconditionError("restriction vector has wrong length")
    if np.any(w < 0) or np.any(w >= 1):
        raise PreconditionError(
            "restriction entries must satisfy 0 <= w_i < 1 (w_i = 1 would "
            "disconnect the effective graph)"
        )
    return VirusParams(params.d, (1.0 - w)[:, None] * params.b)


def solve_endemic(
    params: VirusParams,
    restriction=None,
    max_iter: int = MAX_ITER,
) -> SingleVirusResult:
    """Regime decision and endemic equilibrium for one virus.

    With a restriction w the effective matrix is (I - diag(w)) B. The
    returned reproduction number is the effective one that decides the
    regime.
    """
    eff = _effective_params(params, restriction)
    if np.any(eff.d <= 0):
        raise PreconditionError("healing rates must be strictly positive")
    if np.any(eff.b < 0) or not spectral.irreducible(eff.b):
        raise PreconditionError("infection matrix must be nonnegative irreducible")

    r = spectral.spectral_radius_nonneg(eff.b / eff.d[:, None])
    if r <= 1.0 + R_BOUNDARY_BAND:
        return SingleVirusResult(Regime.HEALTHY_GLOBAL, None, r, 0)

    x = np.ones(eff.n)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        y = fixed_point_step(eff, x)
        # Exact arithmetic gives entrywise descent from the all-ones start;
        # allow round-off slack only.
        if np.any(y > x + 1e-14) or np.any(y < 0):
            raise NonConvergenceError(
                "fixed-point iteration lost monotonicity", last_iterate=y
            )
        done = float(np.max(np.abs(y - x))) <= FIXED_POINT_TOL
        x = y
        if done:
            break
    else:
        raise NonConvergenceError(
            f"fixed-point iteration did not converge in {max_iter} sweeps",
            last_iterate=x,
        )

    x = _newton_polish(eff, x, max_iter)
    return SingleVirusResult(Regime.ENDEMIC, x, r, iterations)


def _newton_polish(eff: VirusParams, x: np.ndarray, max_iter: int) -> np.ndarray:
    for _ in range(50):
        f = single_field(eff.d, eff.b, x)
        if float(np.max(np.abs(f))) <= RESIDUAL_TOL:
            if np.any(x <= 0) or np.any(x >= 1):
                raise NonConvergenceError(
                    "endemic iterate left the open unit box", last_iterate=x
                )
            return x
        x = x - np.linalg.solve(single_jacobian(eff.d, eff.b, x), f)
    raise NonConvergenceError(
        "Newton polish did not reach the residual tolerance", last_iterate=x
    )
