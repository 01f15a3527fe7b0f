"""Equilibrium enumeration and spectral classification.

Under the standing assumptions the bivirus system has exactly one healthy
equilibrium (the origin), at most two boundary equilibria (one virus at
its single-virus endemic profile, the other extinct), and some number of
strictly interior coexistence equilibria. This module finds all of them
inside the region of interest and classifies each by the spectrum of the
2n x 2n Jacobian:

  n_k               eigenvalues with negative real part,
  index             (-1)^n_k, cross-checked against an LU determinant sign,
  hyperbolic_margin min |Re eigenvalue|; below 1e-8 the equilibrium is
                    declared degenerate and an error is raised, because the
                    counting laws only cover hyperbolic spectra.

Search combines analytic boundary/healthy points, damped Newton from grid
and random seeds, and (for weakly coupled block structure) a
predictor-corrector homotopy from the decoupled block systems at coupling
scale t=0 to the full model at t=1.
"""

from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass, replace

import numpy as np

from . import kernels, spectral
from .errors import (
    AssumptionError,
    BivirusError,
    DegenerateEquilibrium,
    PreconditionError,
)
from .model import (
    REGION_TOL,
    BivirusModel,
    State,
    VirusParams,
    model_hash,
    region_violation,
    validate,
    vector_field,
)
from .model import jacobian as model_jacobian
from .singlevirus import Regime, solve_endemic
from .spectral import Spectrum

logger = logging.getLogger(__name__)

# Roots closer than this (inf-norm) are the same equilibrium; well below
# the ~1e-2 spacing seen in concrete instances, well above polish error.
DEDUP_TOL = 1e-6
NEWTON_RESIDUAL = 1e-12
CLASSIFY_RESIDUAL = 1e-10
HYPERBOLIC_MIN = 1e-8
# Newton iterates may leave the region; they are confined to this inflated
# box and roots outside the region are discarded afterwards.
BOX_INFLATION = 1e-2
MAX_HALVINGS = 30
MIN_HOMOTOPY_STEP = 1e-5


class EquilibriumClass(enum.Enum):
    HEALTHY = "healthy"
    BOUNDARY_VIRUS1 = "boundary-virus1"
    BOUNDARY_VIRUS2 = "boundary-virus2"
    COEXISTENCE = "coexistence"


class Provenance(enum.Enum):
    ANALYTIC = "analytic"
    NEWTON_SEED = "newton-seed"
    HOMOTOPY = "homotopy"


_CLASS_ORDER = {
    EquilibriumClass.HEALTHY: 0,
    EquilibriumClass.BOUNDARY_VIRUS1: 1,
    EquilibriumClass.BOUNDARY_VIRUS2: 2,
    EquilibriumClass.COEXISTENCE: 3,
}


@dataclass(frozen=True, eq=False)
class Equilibrium:
    state: State
    eq_class: EquilibriumClass
    spectrum: Spectrum
    n_k: int
    index: int
    hyperbolic_margin: float
    residual: float
    provenance: Provenance

    @property
    def stable(self) -> bool:
        return self.n_k == 2 * self.state.n

    @property
    def unstable_count(self) -> int:
        return 2 * self.state.n - self.n_k


@dataclass
class SearchStats:
    seeds_tried: int = 0
    newton_failures: int = 0
    duplicates_merged: int = 0
    out_of_region: int = 0
    homotopy_paths: int = 0
    homotopy_failures: int = 0

    def merge(self, other: "SearchStats") -> None:
        self.seeds_tried += other.seeds_tried
        self.newton_failures += other.newton_failures
        self.duplicates_merged += other.duplicates_merged
        self.out_of_region += other.out_of_region
        self.homotopy_paths += other.homotopy_paths
        self.homotopy_failures += other.homotopy_failures

    def to_dict(self) -> dict:
        return {
            "seeds_tried": self.seeds_tried,
            "newton_failures": self.newton_failures,
            "duplicates_merged": self.duplicates_merged,
            "out_of_region": self.out_of_region,
            "homotopy_paths": self.homotopy_paths,
            "homotopy_failures": self.homotopy_failures,
        }


@dataclass(frozen=True)
class SearchBudget:
    """Knobs of the enumeration search; defaults match the CLI."""

    grid_levels: int = 5
    random_seeds: int = 500
    confirm_tail: int = 200
    newton_max_iter: int = 100
    rng_seed: int = 42
    homotopy_steps: int = 32
    coupling_threshold: float = 0.01
    blocks: tuple[tuple[int, ...], ...] | None = None
    max_homotopy_paths: int = 4096


@dataclass(frozen=True, eq=False)
class EquilibriumAtlas:
    model: BivirusModel | None
    equilibria: tuple[Equilibrium, ...]
    complete: bool
    search_stats: SearchStats
    model_digest: str

    def __post_init__(self):
        healthy = [e for e in self.equilibria if e.eq_class is EquilibriumClass.HEALTHY]
        b1 = [
            e
            for e in self.equilibria
            if e.eq_class is EquilibriumClass.BOUNDARY_VIRUS1
        ]
        b2 = [
            e
            for e in self.equilibria
            if e.eq_class is EquilibriumClass.BOUNDARY_VIRUS2
        ]
        if len(healthy) != 1:
            raise PreconditionError("atlas must contain exactly one healthy entry")
        if len(b1) > 1 or len(b2) > 1:
            raise PreconditionError("atlas may contain at most one entry per boundary")
        for a, b in itertools.combinations(self.equilibria, 2):
            if (
                float(np.max(np.abs(a.state.stacked() - b.state.stacked())))
                <= DEDUP_TOL
            ):
                raise PreconditionError("atlas entries closer than the dedup tolerance")

    @property
    def n(self) -> int:
        return self.equilibria[0].state.n

    def of_class(self, eq_class: EquilibriumClass) -> list[Equilibrium]:
        return [e for e in self.equilibria if e.eq_class is eq_class]

    @property
    def coexistence(self) -> list[Equilibrium]:
        return self.of_class(EquilibriumClass.COEXISTENCE)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


def analytic_anchor_states(model: BivirusModel):
    """Stacked states of the healthy and the two boundary equilibria."""
    n = model.n
    res1 = solve_endemic(model.virus1)
    res2 = solve_endemic(model.virus2)
    if res1.regime is not Regime.ENDEMIC or res2.regime is not Regime.ENDEMIC:
        raise PreconditionError(
            "boundary equilibria require both reproduction numbers above one"
        )
    b1 = np.concatenate([res1.endemic, np.zeros(n)])
    b2 = np.concatenate([np.zeros(n), res2.endemic])
    return np.zeros(2 * n), b1, b2


def _match_anchor(x: np.ndarray, anchors) -> tuple[np.ndarray, EquilibriumClass | None]:
    healthy, b1, b2 = anchors
    for anchor, tag in (
        (healthy, EquilibriumClass.HEALTHY),
        (b1, EquilibriumClass.BOUNDARY_VIRUS1),
        (b2, EquilibriumClass.BOUNDARY_VIRUS2),
    ):
        if anchor is not None and float(np.max(np.abs(x - anchor))) <= DEDUP_TOL:
            return anchor.copy(), tag
    return x, None


def classify(
    model: BivirusModel,
    state: State,
    provenance: Provenance,
    anchors=None,
) -> Equilibrium:
    """Full spectral classification of an equilibrium state.

    The state must already be a root (field inf-norm at most 1e-10).
    States within the dedup tolerance of an analytic anchor are snapped
    onto it; anything else must be strictly interior to count as a
    coexistence equilibrium.
    """
    if anchors is None:
        anchors = analytic_anchor_states(model)

    x = state.stacked()
    residual = float(np.max(np.abs(vector_field(model, state))))
    if residual > CLASSIFY_RESIDUAL:
        raise PreconditionError(
            f"state is not an equilibrium: residual {residual:.3e} > "
            f"{CLASSIFY_RESIDUAL:.0e}"
        )

    x, tag = _match_anchor(x, anchors)
    snapped = State.from_stacked(x)
    if tag is None:
        n = model.n
        interior = (
            float(np.min(x)) > REGION_TOL
            and float(np.max(x[:n] + x[n:])) < 1.0 - REGION_TOL
        )
        if not interior:
            raise PreconditionError(
                "root lies on the region boundary but matches no known "
                "healthy/boundary equilibrium"
            )
        tag = EquilibriumClass.COEXISTENCE
    residual = float(np.max(np.abs(vector_field(model, snapped))))

    jac = model_jacobian(model, snapped)
    spec = spectral.eigenvalues(jac)
    margin = float(np.min(np.abs(spec.eigenvalues.real)))
    if margin < HYPERBOLIC_MIN:
        raise DegenerateEquilibrium(
            f"equilibrium has hyperbolic margin {margin:.3e} < "
            f"{HYPERBOLIC_MIN:.0e}; the model sits on a degenerate parameter set",
            spectrum=spec,
            state=snapped,
        )
    n_k = int(np.sum(spec.eigenvalues.real < 0))
    index = 1 if n_k % 2 == 0 else -1

    det_sign = spectral.det_sign_lu(jac)
    if det_sign != index:
        raise BivirusError(
            f"index {index} disagrees with LU determinant sign {det_sign}; "
            "eigensolver and LU routes are inconsistent"
        )

    return Equilibrium(
        state=snapped,
        eq_class=tag,
        spectrum=spec,
        n_k=n_k,
        index=index,
        hyperbolic_margin=margin,
        residual=residual,
        provenance=provenance,
    )


def boundary_shortcut(model: BivirusModel, which: int) -> tuple[float, float]:
    """Spectral abscissas of the two diagonal Jacobian blocks at a boundary
    equilibrium.

    For which=1, the state is (xbar1, 0) and the return is
    (sigma of the own-virus block, sigma of the invading-virus block
    -D2 + (I - diag(xbar1)) B2). The own block is always stable; the sign
    of the invading block decides local stability of the whole boundary
    equilibrium.
    """
    if which not in (1, 2):
        raise PreconditionError("which must be 1 or 2")
    own = model.virus1 if which == 1 else model.virus2
    other = model.virus2 if which == 1 else model.virus1
    res = solve_endemic(own)
    if res.regime is not Regime.ENDEMIC:
        raise PreconditionError("boundary equilibrium requires R > 1 for that virus")
    xbar = res.endemic
    own_block = (1.0 - xbar)[:, None] * own.b - np.diag(own.d + own.b @ xbar)
    other_block = (1.0 - xbar)[:, None] * other.b - np.diag(other.d)
    return (
        spectral.eigenvalues(own_block).abscissa,
        spectral.eigenvalues(other_block).abscissa,
    )


def boundary_equilibria(
    model: BivirusModel, anchors=None
) -> tuple[Equilibrium, Equilibrium]:
    """Both boundary equilibria, classified via the full Jacobian.

    The block-triangular shortcut (stability decided by the invading-virus
    block alone) is evaluated as well and must agree with the full-spectrum
    decision; the own-virus block must be stable.
    """
    if anchors is None:
        anchors = analytic_anchor_states(model)
    _, b1_vec, b2_vec = anchors
    n = model.n
    e1 = classify(model, State.from_stacked(b1_vec), Provenance.ANALYTIC, anchors)
    e2 = classify(model, State.from_stacked(b2_vec), Provenance.ANALYTIC, anchors)
    for eq, which in ((e1, 1), (e2, 2)):
        sigma_own, sigma_other = boundary_shortcut(model, which)
        if sigma_own >= 0:
            raise BivirusError(
                f"own-virus Jacobian block at boundary equilibrium {which} is "
                f"not stable (abscissa {sigma_own:.3e})"
            )
        if (sigma_other < 0) != (eq.n_k == 2 * n):
            raise BivirusError(
                f"block shortcut and full spectrum disagree on stability of "
                f"boundary equilibrium {which}"
            )
    return e1, e2


# ---------------------------------------------------------------------------
# Newton search
# ---------------------------------------------------------------------------


def _project_box(x: np.ndarray, n: int) -> np.ndarray:
    lo, hi = -BOX_INFLATION, 1.0 + BOX_INFLATION
    x = np.clip(x, lo, hi)
    s = x[:n] + x[n:]
    over = s > hi
    if np.any(over):
        shift = (s[over] - hi) / 2.0
        x1 = x[:n].copy()
        x2 = x[n:].copy()
        x1[over] -= shift
        x2[over] -= shift
        x = np.concatenate([x1, x2])
    return x


def _damped_newton(model: BivirusModel, x0: np.ndarray, max_iter: int):
    """Damped Newton on the bivirus field, confined to the inflated box.

    Returns the root (stacked) or None. Backtracking halves the step up to
    MAX_HALVINGS times on the squared field norm.
    """
    d1, d2 = model.virus1.d, model.virus2.d
    b1, b2 = model.virus1.b, model.virus2.b
    n = model.n
    x = _project_box(np.asarray(x0, dtype=float).copy(), n)
    f = kernels.field(d1, d2, b1, b2, x)
    for _ in range(max_iter):
        if float(np.max(np.abs(f))) <= NEWTON_RESIDUAL:
            return x
        try:
            dx = np.linalg.solve(kernels.jacobian(d1, d2, b1, b2, x), -f)
        except np.linalg.LinAlgError:
            return None
        f2 = float(f @ f)
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            x_try = _project_box(x + lam * dx, n)
            f_try = kernels.field(d1, d2, b1, b2, x_try)
            if float(f_try @ f_try) < f2:
                x, f = x_try, f_try
                break
            lam /= 2.0
        else:
            return None
    return x if float(np.max(np.abs(f))) <= NEWTON_RESIDUAL else None


def _root_search(model: BivirusModel, seeds, max_iter: int):
    """Raw deduplicated roots (stacked states) from damped Newton runs."""
    roots: list[np.ndarray] = []
    stats = SearchStats()
    for seed in seeds:
        stats.seeds_tried += 1
        root = _damped_newton(model, seed, max_iter)
        if root is None:
            stats.newton_failures += 1
            continue
        if region_violation(State.from_stacked(root)) > REGION_TOL:
            stats.out_of_region += 1
            continue
        if any(float(np.max(np.abs(root - r))) <= DEDUP_TOL for r in roots):
            stats.duplicates_merged += 1
            continue
        roots.append(root)
    return roots, stats


def newton_search(
    model: BivirusModel,
    seeds: list[State],
    budget: SearchBudget | None = None,
    anchors=None,
):
    """Damped Newton from every seed; returns (equilibria, stats).

    Accepted roots have residual at most 1e-12, lie in the region within
    1e-9, and are deduplicated at inf-distance 1e-6. Per-seed failures are
    counted, never raised.
    """
    budget = budget or SearchBudget()
    if anchors is None:
        anchors = analytic_anchor_states(model)
    roots, stats = _root_search(
        model, (s.stacked() for s in seeds), budget.newton_max_iter
    )
    found: list[Equilibrium] = []
    for root in roots:
        try:
            eq = classify(
                model, State.from_stacked(root), Provenance.NEWTON_SEED, anchors
            )
        except PreconditionError:
            stats.newton_failures += 1
            continue
        if any(
            float(np.max(np.abs(eq.state.stacked() - e.state.stacked())))
            <= DEDUP_TOL
            for e in found
        ):
            stats.duplicates_merged += 1
            continue
        found.append(eq)
    return found, stats


# ---------------------------------------------------------------------------
# Homotopy over block coupling strength
# ---------------------------------------------------------------------------


def detect_blocks(
    model: BivirusModel, threshold: float = 0.01
) -> tuple[tuple[int, ...], ...] | None:
    """Partition of nodes into weakly coupled blocks, or None.

    Nodes are joined whenever either infection matrix carries an entry
    above the threshold between them (in either direction); the partition
    is the set of connected components, None if there is only one.
    """
    n = model.n
    strong = (model.virus1.b > threshold) | (model.virus2.b > threshold)
    strong = strong | strong.T
    seen = np.zeros(n, dtype=bool)
    blocks = []
    for start in range(n):
        if seen[start]:
            continue
        comp = []
        frontier = [start]
        seen[start] = True
        while frontier:
            i = frontier.pop()
            comp.append(i)
            for j in np.nonzero(strong[i] & ~seen)[0]:
                seen[j] = True
                frontier.append(int(j))
        blocks.append(tuple(sorted(comp)))
    if len(blocks) <= 1:
        return None
    return tuple(sorted(blocks))


def _submodel(model: BivirusModel, idx: np.ndarray) -> BivirusModel:
    sel = np.ix_(idx, idx)
    return BivirusModel(
        VirusParams(model.virus1.d[idx], model.virus1.b[sel]),
        VirusParams(model.virus2.d[idx], model.virus2.b[sel]),
    )


def _block_roots(block_model: BivirusModel, budget: SearchBudget, rng):
    """All equilibrium states of one decoupled block subsystem.

    Analytic healthy/boundary states plus dense Newton seeding; blocks are
    small, so this is the exhaustive small-n search.
    """
    nb = block_model.n
    zero, b1, b2 = analytic_anchor_states(block_model)
    seeds = list(_grid_seeds(b1[:nb], b2[nb:], budget.grid_levels))
    seeds.extend(_random_region_states(rng, nb, max(100, 40 * nb)))
    roots, _ = _root_search(block_model, seeds, budget.newton_max_iter)
    out = [zero, b1, b2]
    for r in roots:
        if all(float(np.max(np.abs(r - o))) > DEDUP_TOL for o in out):
            out.append(r)
    return out


def _coupling_split(b: np.ndarray, blocks) -> tuple[np.ndarray, np.ndarray]:
    inner = np.zeros_like(b)
    for blk in blocks:
        sel = np.ix_(blk, blk)
        inner[sel] = b[sel]
    return inner, b - inner


def _track_path(model, z0, inner1, cross1, inner2, cross2, steps, max_iter):
    """Predictor-corrector continuation of one root from t=0 to t=1."""
    d1, d2 = model.virus1.d, model.virus2.d

    def _newton_at(bt1, bt2, z):
        z = z.copy()
        f = kernels.field(d1, d2, bt1, bt2, z)
        for _ in range(max_iter):
            if float(np.max(np.abs(z))) > 2.0:
                return None
            if float(np.max(np.abs(f))) <= NEWTON_RESIDUAL:
                return z
            try:
                dz = np.linalg.solve(kernels.jacobian(d1, d2, bt1, bt2, z), -f)
            except np.linalg.LinAlgError:
                return None
            f2 = float(f @ f)
            lam = 1.0
            for _ in range(MAX_HALVINGS + 1):
                z_try = z + lam * dz
                f_try = kernels.field(d1, d2, bt1, bt2, z_try)
                if float(f_try @ f_try) < f2:
                    z, f = z_try, f_try
                    break
                lam /= 2.0
            else:
                return None
        return None

    t = 0.0
    h = 1.0 / steps
    z = z0.copy()
    z_prev = None
    h_prev = None
    while t < 1.0:
        h = min(h, 1.0 - t)
        if z_prev is not None and h_prev is not None and h_prev > 0:
            pred = z + (z - z_prev) * (h / h_prev)
        else:
            pred = z
        bt1 = inner1 + (t + h) * cross1
        bt2 = inner2 + (t + h) * cross2
        z_new = _newton_at(bt1, bt2, pred)
        if z_new is None:
            h /= 2.0
            if h < MIN_HOMOTOPY_STEP:
                return None
            continue
        z_prev, h_prev = z, h
        z = z_new
        t += h
        h = min(2.0 * h, 1.0 / steps)
    return z


def homotopy_enumerate(
    model: BivirusModel,
    blocks,
    steps: int | None = None,
    budget: SearchBudget | None = None,
    anchors=None,
):
    """Equilibria found by continuation from the decoupled block systems.

    The cross-block entries of both infection matrices are scaled by t; at
    t=0 each block subsystem is enumerated exhaustively and the Cartesian
    products of block equilibria seed the paths, which are tracked to t=1
    by a secant predictor and Newton corrector with adaptive step halving.
    Roots at t=1 are filtered to the region, deduplicated and classified.
    Per-path failures are counted, never raised.
    """
    budget = budget or SearchBudget()
    steps = steps or budget.homotopy_steps
    n = model.n
    blocks = tuple(tuple(int(i) for i in blk) for blk in blocks)
    flat = sorted(i for blk in blocks for i in blk)
    if flat != list(range(n)):
        raise PreconditionError("blocks must partition the node set")

    rng = np.random.default_rng(budget.rng_seed)
    block_roots = []
    for blk in blocks:
        sub = _submodel(model, np.array(blk))
        report = validate(sub)
        if not report.ok:
            raise PreconditionError(
                f"block {blk} violates the standing assumptions: "
                + "; ".join(report.failures)
            )
        block_roots.append(_block_roots(sub, budget, rng))

    n_paths = int(np.prod([len(r) for r in block_roots]))
    if n_paths > budget.max_homotopy_paths:
        raise PreconditionError(
            f"{n_paths} homotopy paths exceed the budget cap "
            f"{budget.max_homotopy_paths}"
        )

    inner1, cross1 = _coupling_split(model.virus1.b, blocks)
    inner2, cross2 = _coupling_split(model.virus2.b, blocks)

    stats = SearchStats()
    roots: list[np.ndarray] = []
    for combo in itertools.product(*block_roots):
        stats.homotopy_paths += 1
        z0 = np.zeros(2 * n)
        for blk, zb in zip(blocks, combo):
            nb = len(blk)
            for local, node in enumerate(blk):
                z0[node] = zb[local]
                z0[n + node] = zb[nb + local]
        z1 = _track_path(
            model, z0, inner1, cross1, inner2, cross2, steps, budget.newton_max_iter
        )
        if z1 is None:
            stats.homotopy_failures += 1
            continue
        if region_violation(State.from_stacked(z1)) > REGION_TOL:
            stats.out_of_region += 1
            continue
        if any(float(np.max(np.abs(z1 - r))) <= DEDUP_TOL for r in roots):
            stats.duplicates_merged += 1
            continue
        roots.append(z1)

    if anchors is None:
        anchors = analytic_anchor_states(model)
    found: list[Equilibrium] = []
    for root in roots:
        try:
            eq = classify(
                model, State.from_stacked(root), Provenance.HOMOTOPY, anchors
            )
        except PreconditionError:
            stats.homotopy_failures += 1
            continue
        found.append(eq)
    return found, stats


# ---------------------------------------------------------------------------
# Full enumeration
# ---------------------------------------------------------------------------


def _grid_seeds(xbar1: np.ndarray, xbar2: np.ndarray, levels: int):
    """Seeds alpha*xbar1 (+) gamma*xbar2 over the simplex alpha+gamma <= 1."""
    fractions = np.linspace(0.0, 1.0, levels)
    for a in fractions:
        for g in fractions:
            if a + g <= 1.0 + 1e-12:
                yield np.concatenate([a * xbar1, g * xbar2])


def _random_region_states(rng, n: int, count: int):
    """Uniform draws from the interior of the region of interest.

    Per node, (x1, x2) is sampled uniformly on the unit square and
    reflected into the triangle x1 + x2 <= 1, which is uniform there.
    """
    out = []
    for _ in range(count):
        u = rng.random(n)
        v = rng.random(n)
        over = u + v > 1.0
        u[over], v[over] = 1.0 - u[over], 1.0 - v[over]
        out.append(np.concatenate([u, v]))
    return out


def _sorted_entries(entries):
    def key(eq: Equilibrium):
        return (_CLASS_ORDER[eq.eq_class], eq.n_k, tuple(eq.state.stacked()))

    return tuple(sorted(entries, key=key))


def _counting_checks_pass(atlas: EquilibriumAtlas) -> bool:
    from . import counting

    try:
        ph = counting.poincare_hopf_sum(atlas)
        verdicts = counting.morse_inequalities(counting.morse_vector(atlas))
    except PreconditionError:
        return False
    return ph.holds and all(v.holds for v in verdicts)


def enumerate_all(
    model: BivirusModel, budget: SearchBudget | None = None
) -> EquilibriumAtlas:
    """Enumerate every equilibrium in the region of interest.

    Runs the analytic healthy/boundary construction, grid-seeded and
    random-seeded damped Newton, and the coupling homotopy when a block
    partition is supplied or detected. The atlas is flagged complete when
    the final stretch of random seeds produced nothing new and the
    counting checks certify the index sum and sphere Morse inequalities.
    """
    budget = budget or SearchBudget()
    report = validate(model)
    if not report.ok:
        raise AssumptionError(
            "model violates the standing assumptions: "
            + "; ".join(report.failures),
            report=report,
        )

    n = model.n
    rng = np.random.default_rng(budget.rng_seed)
    anchors = analytic_anchor_states(model)
    zero_vec, b1_vec, b2_vec = anchors

    healthy = classify(
        model, State.from_stacked(zero_vec), Provenance.ANALYTIC, anchors
    )
    e1, e2 = boundary_equilibria(model, anchors)
    entries: list[Equilibrium] = [healthy, e1, e2]
    stats = SearchStats()

    def _merge(eq: Equilibrium) -> bool:
        for known in entries:
            if (
                float(np.max(np.abs(eq.state.stacked() - known.state.stacked())))
                <= DEDUP_TOL
            ):
                stats.duplicates_merged += 1
                return False
        entries.append(eq)
        return True

    grid = [
        State.from_stacked(s)
        for s in _grid_seeds(b1_vec[:n], b2_vec[n:], budget.grid_levels)
    ]
    found, s = newton_search(model, grid, budget, anchors)
    stats.merge(s)
    for eq in found:
        _merge(eq)

    blocks = budget.blocks or detect_blocks(model, budget.coupling_threshold)
    if blocks is not None and len(blocks) > 1:
        try:
            found, s = homotopy_enumerate(
                model, blocks, budget.homotopy_steps, budget, anchors
            )
            stats.merge(s)
            for eq in found:
                _merge(eq)
        except PreconditionError as exc:
            logger.warning("homotopy stage skipped: %s", exc)

    last_new = -1
    for i, seed in enumerate(_random_region_states(rng, n, budget.random_seeds)):
        stats.seeds_tried += 1
        root = _damped_newton(model, seed, budget.newton_max_iter)
        if root is None:
            stats.newton_failures += 1
            continue
        if region_violation(State.from_stacked(root)) > REGION_TOL:
            stats.out_of_region += 1
            continue
        try:
            eq = classify(
                model, State.from_stacked(root), Provenance.NEWTON_SEED, anchors
            )
        except PreconditionError:
            stats.newton_failures += 1
            continue
        if _merge(eq):
            last_new = i

    saturated = (budget.random_seeds - 1 - last_new) >= budget.confirm_tail
    atlas = EquilibriumAtlas(
        model=model,
        equilibria=_sorted_entries(entries),
        complete=False,
        search_stats=stats,
        model_digest=model_hash(model),
    )
    counting_ok = _counting_checks_pass(atlas)
    complete = saturated and counting_ok
    if not complete:
        logger.warning(
            "atlas incomplete: saturation=%s counting_checks=%s "
            "(seeds=%d, equilibria=%d); consider a larger search budget",
            saturated,
            counting_ok,
            stats.seeds_tried,
            len(entries),
        )
    return replace(atlas, complete=complete)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def atlas_to_dict(atlas: EquilibriumAtlas) -> dict:
    return {
        "model_hash": atlas.model_digest,
        "n": atlas.n,
        "complete": atlas.complete,
        "search_stats": atlas.search_stats.to_dict(),
        "equilibria": [
            {
                "class": eq.eq_class.value,
                "x1": eq.state.x1.tolist(),
                "x2": eq.state.x2.tolist(),
                "n_k": eq.n_k,
                "index": eq.index,
                "eigenvalues": [
                    [float(v.real), float(v.imag)] for v in eq.spectrum.eigenvalues
                ],
                "residual": eq.residual,
                "hyperbolic_margin": eq.hyperbolic_margin,
                "provenance": eq.provenance.value,
            }
            for eq in atlas.equilibria
        ],
    }


def atlas_from_dict(data: dict) -> EquilibriumAtlas:
    entries = []
    for rec in data["equilibria"]:
        vals = np.array([complex(re, im) for re, im in rec["eigenvalues"]])
        spec = Spectrum(
            eigenvalues=vals,
            abscissa=float(np.max(vals.real)),
            radius=float(np.max(np.abs(vals))),
        )
        entries.append(
            Equilibrium(
                state=State(np.array(rec["x1"]), np.array(rec["x2"])),
                eq_class=EquilibriumClass(rec["class"]),
                spectrum=spec,
                n_k=int(rec["n_k"]),
                index=int(rec["index"]),
                hyperbolic_margin=float(rec["hyperbolic_margin"]),
                residual=float(rec["residual"]),
                provenance=Provenance(rec["provenance"]),
            )
        )
    stats = SearchStats(**data["search_stats"])
    return EquilibriumAtlas(
        model=None,
        equilibria=tuple(entries),
        complete=bool(data["complete"]),
        search_stats=stats,
        model_digest=data["model_hash"],
    )
