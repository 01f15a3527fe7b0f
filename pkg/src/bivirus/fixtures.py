"""Built-in example models.

example1: two weakly coupled two-node subsystems whose four attractors
(two boundary, two coexistence) coexist with five unstable interior
equilibria. The lower-right block of B2 is the corrected value
[[1.6, 1], [1, 1.6]] that reproduces the published equilibrium tables;
see the test suite for the residual evidence.

example2: a variant with one stable and one unstable boundary
equilibrium and two coexistence equilibria.

scalar1: one node, healing rate 1, infection rates 2 and 3; mixed
boundary stability and no coexistence.

mixed-n2: two nodes with B1 entrywise dominating B2, which forces the
virus-1 boundary equilibrium to be the single global attractor.
"""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError
from .model import BivirusModel, VirusParams

_EXAMPLE1_B1 = [
    [1.6, 1.0, 0.001, 0.001],
    [1.0, 1.6, 0.001, 0.001],
    [0.001, 0.001, 2.1, 0.156],
    [0.001, 0.001, 3.0659, 1.1],
]
_EXAMPLE1_B2 = [
    [2.1, 0.156, 0.001, 0.001],
    [3.0659, 1.1, 0.001, 0.001],
    [0.001, 0.001, 1.6, 1.0],
    [0.001, 0.001, 1.0, 1.6],
]
_EXAMPLE2_B1 = [
    [1.6, 1.0, 0.001, 0.001],
    [1.0, 1.6, 0.001, 0.001],
    [0.001, 0.001, 1.7, 1.0],
    [0.001, 0.001, 1.2, 0.5],
]
_EXAMPLE2_B2 = [
    [2.1, 0.156, 0.001, 0.001],
    [3.0659, 1.1, 0.001, 0.001],
    [0.001, 0.001, 1.6, 1.0],
    [0.001, 0.001, 1.2, 0.0],
]


def _example1() -> BivirusModel:
    ones = np.ones(4)
    return BivirusModel(
        VirusParams(ones, np.array(_EXAMPLE1_B1)),
        VirusParams(ones, np.array(_EXAMPLE1_B2)),
    )


def _example2() -> BivirusModel:
    ones = np.ones(4)
    return BivirusModel(
        VirusParams(ones, np.array(_EXAMPLE2_B1)),
        VirusParams(ones, np.array(_EXAMPLE2_B2)),
    )


def _scalar1() -> BivirusModel:
    return BivirusModel(
        VirusParams(np.array([1.0]), np.array([[2.0]])),
        VirusParams(np.array([1.0]), np.array([[3.0]])),
    )


def _mixed_n2() -> BivirusModel:
    b1 = np.array([[1.6, 1.0], [1.0, 1.6]])
    ones = np.ones(2)
    return BivirusModel(VirusParams(ones, b1), VirusParams(ones, 0.8 * b1))


FIXTURES = {
    "example1": _example1,
    "example2": _example2,
    "scalar1": _scalar1,
    "mixed-n2": _mixed_n2,
}


def fixture_names() -> list[str]:
    return sorted(FIXTURES)


def get_fixture(name: str) -> BivirusModel:
    try:
        builder = FIXTURES[name]
    except KeyError:
        raise PreconditionError(
            f"unknown fixture '{name}'; available: {', '.join(fixture_names())}"
        ) from None
    return builder()
