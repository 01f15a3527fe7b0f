"""Counting-law certification of an equilibrium atlas.

Compactifying the bivirus flow onto an even-dimensional sphere turns the
boundary of the region of interest into a single source at the north
pole. Two families of constraints follow for hyperbolic equilibria:

* the Poincaré-Hopf index sum: summing (-1)^n_k over all equilibria
  except the healthy one and any unstable boundary equilibrium gives
  exactly 1;
* the sphere Morse inequalities on the counts c_lambda of equilibria
  with exactly lambda stable eigenvalues, where the healthy equilibrium
  together with all unstable boundary equilibria contributes a single
  synthetic unit to c_0 (the north-pole source), stable boundary and
  coexistence equilibria count individually, and the final alternating
  sum equals the sphere's Euler characteristic 2.

Every check re-derives n_k from the stored eigenvalues so a certificate
never trusts solver bookkeeping.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .equilibria import Equilibrium, EquilibriumAtlas, EquilibriumClass
from .errors import DegenerateEquilibrium, PreconditionError

HYPERBOLIC_MIN = 1e-8


class Configuration(enum.Enum):
    BOTH_BOUNDARY_UNSTABLE = "both-boundary-unstable"
    BOTH_BOUNDARY_STABLE = "both-boundary-stable"
    MIXED_BOUNDARY = "mixed-boundary"


@dataclass(frozen=True)
class MorseVector:
    """Counts c_0..c_2n of equilibria by stable-eigenvalue count."""

    c: tuple[int, ...]
    n: int

    def __post_init__(self):
        if len(self.c) != 2 * self.n + 1:
            raise PreconditionError("Morse vector must have length 2n + 1")
        if any(v < 0 for v in self.c):
            raise PreconditionError("Morse counts must be nonnegative")


@dataclass(frozen=True)
class InequalityVerdict:
    index: int
    lhs: int
    rhs: int
    holds: bool
    is_equality: bool


@dataclass(frozen=True)
class PoincareHopf:
    ph_sum: int
    holds: bool
    counted: tuple[Equilibrium, ...]


@dataclass(frozen=True)
class CoexistenceBounds:
    """Lower bounds on coexistence equilibria implied by the index sum."""

    configuration: Configuration
    parity: str  # "odd" or "even"
    k_min: int
    even_nk_min: int
    odd_nk_min: int
    stable_guaranteed: bool

    def to_dict(self) -> dict:
        return {
            "configuration": self.configuration.value,
            "parity": self.parity,
            "k_min": self.k_min,
            "even_nk_min": self.even_nk_min,
            "odd_nk_min": self.odd_nk_min,
            "stable_guaranteed": self.stable_guaranteed,
        }


@dataclass(frozen=True)
class CountReport:
    ph_sum: int
    ph_holds: bool
    configuration: Configuration
    morse: MorseVector
    morse_verdicts: tuple[InequalityVerdict, ...]
    all_equalities: bool
    coexistence_bounds: CoexistenceBounds
    coexistence_count: int


def _derive_nk(eq: Equilibrium) -> int:
    vals = eq.spectrum.eigenvalues
    margin = float(np.min(np.abs(vals.real)))
    if margin < HYPERBOLIC_MIN:
        raise DegenerateEquilibrium(
            f"atlas entry has hyperbolic margin {margin:.3e} < "
            f"{HYPERBOLIC_MIN:.0e}",
            spectrum=eq.spectrum,
            state=eq.state,
        )
    return int(np.sum(vals.real < 0))


def _is_stable(eq: Equilibrium, dim: int) -> bool:
    return _derive_nk(eq) == dim


def poincare_hopf_sum(atlas: EquilibriumAtlas) -> PoincareHopf:
    """Index sum over the counted equilibria.

    The healthy equilibrium is never counted; a boundary equilibrium is
    counted only when its full Jacobian is stable. The sum must be 1.
    """
    dim = 2 * atlas.n
    counted = []
    for eq in atlas.equilibria:
        if eq.eq_class is EquilibriumClass.HEALTHY:
            _derive_nk(eq)  # still enforce hyperbolicity
            continue
        if eq.eq_class in (
            EquilibriumClass.BOUNDARY_VIRUS1,
            EquilibriumClass.BOUNDARY_VIRUS2,
        ) and not _is_stable(eq, dim):
            continue
        counted.append(eq)
    total = int(sum((-1) ** _derive_nk(eq) for eq in counted))
    return PoincareHopf(
        ph_sum=total, holds=bool(counted) and total == 1, counted=tuple(counted)
    )


def configuration(atlas: EquilibriumAtlas) -> Configuration:
    """Stability pattern of the two boundary equilibria."""
    b1 = atlas.of_class(EquilibriumClass.BOUNDARY_VIRUS1)
    b2 = atlas.of_class(EquilibriumClass.BOUNDARY_VIRUS2)
    if not b1 or not b2:
        raise PreconditionError("atlas must contain both boundary equilibria")
    dim = 2 * atlas.n
    s1 = _is_stable(b1[0], dim)
    s2 = _is_stable(b2[0], dim)
    if s1 and s2:
        return Configuration.BOTH_BOUNDARY_STABLE
    if not s1 and not s2:
        return Configuration.BOTH_BOUNDARY_UNSTABLE
    return Configuration.MIXED_BOUNDARY


def coexistence_bounds(
    config: Configuration, known_stable_coexistence: int = 0
) -> CoexistenceBounds:
    """Parity and lower bounds for the coexistence count k.

    Both boundary equilibria unstable: k odd, the even-n_k side carries
    one more than the odd side, and at least one coexistence equilibrium
    is stable. Both stable: k odd with the odd-n_k (all unstable) side
    one ahead, so s known stable coexistence points force k >= 2s + 1.
    Mixed: k even, split half and half.
    """
    if known_stable_coexistence < 0:
        raise PreconditionError("known stable coexistence count must be >= 0")
    s = known_stable_coexistence
    if config is Configuration.BOTH_BOUNDARY_UNSTABLE:
        k_min = max(1, 2 * s - 1)
        return CoexistenceBounds(
            configuration=config,
            parity="odd",
            k_min=k_min,
            even_nk_min=(k_min + 1) // 2,
            odd_nk_min=(k_min - 1) // 2,
            stable_guaranteed=True,
        )
    if config is Configuration.BOTH_BOUNDARY_STABLE:
        k_min = 2 * s + 1
        return CoexistenceBounds(
            configuration=config,
            parity="odd",
            k_min=k_min,
            even_nk_min=(k_min - 1) // 2,
            odd_nk_min=(k_min + 1) // 2,
            stable_guaranteed=False,
        )
    k_min = 2 * s
    return CoexistenceBounds(
        configuration=config,
        parity="even",
        k_min=k_min,
        even_nk_min=k_min // 2,
        odd_nk_min=k_min // 2,
        stable_guaranteed=False,
    )


def morse_vector(atlas: EquilibriumAtlas) -> MorseVector:
    """Morse counts with the north-pole bookkeeping applied.

    Coexistence equilibria and stable boundary equilibria each add one to
    c at their own n_k. The healthy equilibrium and every unstable
    boundary equilibrium are replaced, jointly, by a single unit in c_0:
    they all map onto the one source at the sphere's north pole. Interior
    sources already counted by the first rule are not counted twice.
    """
    n = atlas.n
    dim = 2 * n
    c = [0] * (dim + 1)
    for eq in atlas.equilibria:
        if eq.eq_class is EquilibriumClass.HEALTHY:
            _derive_nk(eq)
            continue
        nk = _derive_nk(eq)
        if (
            eq.eq_class
            in (EquilibriumClass.BOUNDARY_VIRUS1, EquilibriumClass.BOUNDARY_VIRUS2)
            and nk != dim
        ):
            continue
        c[nk] += 1
    c[0] += 1
    return MorseVector(c=tuple(c), n=n)


def _morse_inequalities_general(c, betti) -> list[InequalityVerdict]:
    """Alternating partial-sum inequalities for arbitrary Betti numbers.

    Internal parameterization; the public check instantiates the sphere
    constants r_0 = r_dim = 1 and 0 elsewhere.
    """
    dim = len(c) - 1
    verdicts = []
    lhs = 0
    rhs = 0
    for j in range(dim + 1):
        lhs = c[j] - lhs
        rhs = betti[j] - rhs
        final = j == dim
        holds = (lhs == rhs) if final else (lhs >= rhs)
        verdicts.append(
            InequalityVerdict(
                index=j, lhs=lhs, rhs=rhs, holds=holds, is_equality=lhs == rhs
            )
        )
    return verdicts


def morse_inequalities(m: MorseVector) -> tuple[InequalityVerdict, ...]:
    """Sphere Morse inequalities for the counts in m.

    The j-th alternating partial sum c_j - c_{j-1} + ... +- c_0 must be
    at least 1 for even j and at least -1 for odd j; the final sum (j =
    2n) must equal 2.
    """
    dim = 2 * m.n
    betti = [0] * (dim + 1)
    betti[0] = betti[dim] = 1
    return tuple(_morse_inequalities_general(m.c, betti))


def all_equalities(verdicts) -> bool:
    return all(v.is_equality for v in verdicts)


# Admissible Morse vectors for two-node models: no coexistence or one
# coexistence equilibrium gives the first pattern; two coexistence
# equilibria (one boundary stable, one unstable) give the other four.
N2_ADMISSIBLE = (
    (1, 0, 0, 0, 1),
    (1, 0, 0, 1, 2),
    (2, 1, 0, 0, 1),
    (1, 1, 1, 0, 1),
    (1, 0, 1, 1, 1),
)


@dataclass(frozen=True)
class N2Verdict:
    observed: tuple[int, ...]
    matches: bool
    matched_pattern: tuple[int, ...] | None


def n2_configuration_check(atlas: EquilibriumAtlas) -> N2Verdict:
    """Membership of the observed Morse vector in the two-node family."""
    if atlas.n != 2:
        raise PreconditionError("configuration family check requires n = 2")
    observed = morse_vector(atlas).c
    for pattern in N2_ADMISSIBLE:
        if observed == pattern:
            return N2Verdict(observed=observed, matches=True, matched_pattern=pattern)
    return N2Verdict(observed=observed, matches=False, matched_pattern=None)


def build_count_report(atlas: EquilibriumAtlas) -> CountReport:
    """Full certification bundle for one atlas."""
    ph = poincare_hopf_sum(atlas)
    config = configuration(atlas)
    morse = morse_vector(atlas)
    verdicts = morse_inequalities(morse)
    dim = 2 * atlas.n
    known_stable = sum(
        1 for eq in atlas.coexistence if _derive_nk(eq) == dim
    )
    bounds = coexistence_bounds(config, known_stable)
    return CountReport(
        ph_sum=ph.ph_sum,
        ph_holds=ph.holds,
        configuration=config,
        morse=morse,
        morse_verdicts=verdicts,
        all_equalities=all_equalities(verdicts),
        coexistence_bounds=bounds,
        coexistence_count=len(atlas.coexistence),
    )


def report_to_dict(report: CountReport) -> dict:
    return {
        "ph_sum": report.ph_sum,
        "ph_holds": report.ph_holds,
        "configuration": report.configuration.value,
        "c": list(report.morse.c),
        "inequalities": [
            {
                "index": v.index,
                "lhs": v.lhs,
                "rhs": v.rhs,
                "holds": v.holds,
                "is_equality": v.is_equality,
            }
            for v in report.morse_verdicts
        ],
        "all_equalities": report.all_equalities,
        "coexistence_count": report.coexistence_count,
        "bounds": report.coexistence_bounds.to_dict(),
    }
