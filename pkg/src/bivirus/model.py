"""Bivirus model definition, assumption checks, field and Jacobian.

The model couples two SIS contagions over n nodes. Each virus has a
diagonal healing-rate matrix D (stored as a vector) and a nonnegative
infection-rate matrix B whose entry (i, j) is the rate from node j to
node i. The state stacks the two per-node infected fractions; the region
of interest is the product of per-node triangles

    0 <= x1_i, 0 <= x2_i, x1_i + x2_i <= 1.

Standing assumptions: D positive definite and B irreducible for both
viruses (assumption 1); both single-virus reproduction numbers
rho(D^-1 B) above one (assumption 2). Violations are reported, not
raised, so a front end can show every failure at once.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels, spectral
from .errors import ModelFormatError, PreconditionError

# Integrators graze the region boundary by round-off; membership checks
# use this slack.
REGION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class VirusParams:
    """Per-virus parameters: healing-rate vector d and infection matrix b."""

    d: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if d.ndim != 1:
            raise PreconditionError("healing rates must be a vector")
        if b.shape != (d.shape[0], d.shape[0]):
            raise PreconditionError(
                f"infection matrix shape {b.shape} does not match n={d.shape[0]}"
            )
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(b))):
            raise PreconditionError("virus parameters must be finite")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True, eq=False)
class BivirusModel:
    """The full parameter tuple (n, D1, B1, D2, B2)."""

    virus1: VirusParams
    virus2: VirusParams

    def __post_init__(self):
        if self.virus1.n != self.virus2.n:
            raise PreconditionError("virus parameter dimensions disagree")

    @property
    def n(self) -> int:
        return self.virus1.n


@dataclass(frozen=True, eq=False)
class State:
    """A point (x1, x2) of stacked per-node infected fractions."""

    x1: np.ndarray
    x2: np.ndarray

    def __post_init__(self):
        x1 = np.asarray(self.x1, dtype=float)
        x2 = np.asarray(self.x2, dtype=float)
        if x1.ndim != 1 or x1.shape != x2.shape:
            raise PreconditionError("state components must be equal-length vectors")
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)

    @property
    def n(self) -> int:
        return self.x1.shape[0]

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.x1, self.x2])

    @staticmethod
    def from_stacked(vec) -> "State":
        v = np.asarray(vec, dtype=float)
        if v.ndim != 1 or v.shape[0] % 2:
            raise PreconditionError("stacked state must have even length")
        n = v.shape[0] // 2
        return State(v[:n].copy(), v[n:].copy())


def region_violation(state: State) -> float:
    """How far the state sits outside the region of interest (0 if inside)."""
    x1, x2 = state.x1, state.x2
    v = max(0.0, float(np.max(-x1)), float(np.max(-x2)))
    v = max(v, float(np.max(x1 - 1.0)), float(np.max(x2 - 1.0)))
    return max(v, float(np.max(x1 + x2 - 1.0)))


def in_region(state: State, tol: float = REGION_TOL) -> bool:
    return region_violation(state) <= tol


@dataclass(frozen=True)
class ValidationReport:
    """Pass/fail per standing assumption, plus reproduction numbers."""

    d1_positive: bool
    d2_positive: bool
    b1_nonnegative: bool
    b2_nonnegative: bool
    b1_irreducible: bool
    b2_irreducible: bool
    r1: float | None
    r2: float | None
    failures: tuple[str, ...] = field(default=())

    @property
    def assumption1_ok(self) -> bool:
        return (
            self.d1_positive
            and self.d2_positive
            and self.b1_nonnegative
            and self.b2_nonnegative
            and self.b1_irreducible
            and self.b2_irreducible
        )

    @property
    def assumption2_ok(self) -> bool:
        return (
            self.r1 is not None
            and self.r2 is not None
            and self.r1 > 1.0
            and self.r2 > 1.0
        )

    @property
    def ok(self) -> bool:
        return self.assumption1_ok and self.assumption2_ok

    def to_dict(self) -> dict:
        return {
            "assumption1": {
                "d1_positive": self.d1_positive,
                "d2_positive": self.d2_positive,
                "b1_nonnegative": self.b1_nonnegative,
                "b2_nonnegative": self.b2_nonnegative,
                "b1_irreducible": self.b1_irreducible,
                "b2_irreducible": self.b2_irreducible,
                "ok": self.assumption1_ok,
            },
            "assumption2": {"r1": self.r1, "r2": self.r2, "ok": self.assumption2_ok},
            "ok": self.ok,
            "failures": list(self.failures),
        }


def validate(model: BivirusModel) -> ValidationReport:
    """Check both standing assumptions; failures become report entries."""
    failures = []

    def _check(flag, message):
        if not flag:
            failures.append(message)
        return flag

    v1, v2 = model.virus1, model.virus2
    d1_pos = _check(bool(np.all(v1.d > 0)), "D1 must be strictly positive")
    d2_pos = _check(bool(np.all(v2.d > 0)), "D2 must be strictly positive")
    b1_nn = _check(bool(np.all(v1.b >= 0)), "B1 must be nonnegative")
    b2_nn = _check(bool(np.all(v2.b >= 0)), "B2 must be nonnegative")
    b1_irr = _check(
        b1_nn and spectral.irreducible(v1.b), "B1 must be irreducible"
    )
    b2_irr = _check(
        b2_nn and spectral.irreducible(v2.b), "B2 must be irreducible"
    )

    r1 = r2 = None
    if d1_pos and b1_irr:
        r1 = spectral.spectral_radius_nonneg(v1.b / v1.d[:, None])
        _check(
            r1 > 1.0,
            f"reproduction number R1 = {r1:.6g} <= 1: virus 1 dies out and the "
            "system reduces to the single-virus dynamics of virus 2",
        )
    if d2_pos and b2_irr:
        r2 = spectral.spectral_radius_nonneg(v2.b / v2.d[:, None])
        _check(
            r2 > 1.0,
            f"reproduction number R2 = {r2:.6g} <= 1: virus 2 dies out and the "
            "system reduces to the single-virus dynamics of virus 1",
        )

    return ValidationReport(
        d1_positive=d1_pos,
        d2_positive=d2_pos,
        b1_nonnegative=b1_nn,
        b2_nonnegative=b2_nn,
        b1_irreducible=b1_irr,
        b2_irreducible=b2_irr,
        r1=r1,
        r2=r2,
        failures=tuple(failures),
    )


def reproduction_numbers(model: BivirusModel) -> tuple[float, float]:
    """Both single-virus reproduction numbers rho((D^i)^-1 B^i)."""
    v1, v2 = model.virus1, model.virus2
    if np.any(v1.d <= 0) or np.any(v2.d <= 0):
        raise PreconditionError("healing rates must be strictly positive")
    r1 = spectral.spectral_radius_nonneg(v1.b / v1.d[:, None])
    r2 = spectral.spectral_radius_nonneg(v2.b / v2.d[:, None])
    return r1, r2


def vector_field(model: BivirusModel, state: State) -> np.ndarray:
    """Stacked time derivative (dx1/dt, dx2/dt) at the given state.

    Polynomial in the state, hence defined everywhere; region membership
    is not required.
    """
    if state.n != model.n:
        raise PreconditionError(
            f"state dimension {state.n} does not match model n={model.n}"
        )
    x = state.stacked()
    if not np.all(np.isfinite(x)):
        raise PreconditionError("state must be finite")
    return kernels.field(
        model.virus1.d, model.virus2.d, model.virus1.b, model.virus2.b, x
    )


def jacobian(model: BivirusModel, state: State) -> np.ndarray:
    """Analytic 2n x 2n Jacobian of the field at the given state."""
    if state.n != model.n:
        raise PreconditionError(
            f"state dimension {state.n} does not match model n={model.n}"
        )
    x = state.stacked()
    if not np.all(np.isfinite(x)):
        raise PreconditionError("state must be finite")
    return kernels.jacobian(
        model.virus1.d, model.virus2.d, model.virus1.b, model.virus2.b, x
    )


# ---------------------------------------------------------------------------
# Model file schema: a single JSON object
#   {"n": int, "D1": [n], "D2": [n], "B1": [[n x n]], "B2": [[n x n]]}
# Row i, column j of Bk is the transmission rate from node j to node i.
# NaN/Inf are rejected.
# ---------------------------------------------------------------------------


def model_to_dict(model: BivirusModel) -> dict:
    return {
        "n": model.n,
        "D1": model.virus1.d.tolist(),
        "D2": model.virus2.d.tolist(),
        "B1": model.virus1.b.tolist(),
        "B2": model.virus2.b.tolist(),
    }


def _field_vector(data: dict, name: str, n: int) -> np.ndarray:
    raw = data[name]
    if not isinstance(raw, list) or len(raw) != n:
        raise ModelFormatError(f"field '{name}' must be a list of {n} numbers")
    try:
        vec = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"field '{name}' contains non-numeric entries") from exc
    if not np.all(np.isfinite(vec)):
        raise ModelFormatError(f"field '{name}' contains NaN or Inf")
    return vec


def _field_matrix(data: dict, name: str, n: int) -> np.ndarray:
    raw = data[name]
    if not isinstance(raw, list) or len(raw) != n:
        raise ModelFormatError(f"field '{name}' must be a list of {n} rows")
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != n:
            raise ModelFormatError(
                f"field '{name}' row {i} must be a list of {n} numbers"
            )
    try:
        mat = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"field '{name}' contains non-numeric entries") from exc
    if not np.all(np.isfinite(mat)):
        raise ModelFormatError(f"field '{name}' contains NaN or Inf")
    return mat


def model_from_dict(data: dict) -> BivirusModel:
    if not isinstance(data, dict):
        raise ModelFormatError("model document must be a JSON object")
    for name in ("n", "D1", "D2", "B1", "B2"):
        if name not in data:
            raise ModelFormatError(f"missing required field '{name}'")
    n = data["n"]
    if not isinstance(n, int) or n < 1:
        raise ModelFormatError("field 'n' must be a positive integer")
    d1 = _field_vector(data, "D1", n)
    d2 = _field_vector(data, "D2", n)
    b1 = _field_matrix(data, "B1", n)
    b2 = _field_matrix(data, "B2", n)
    return BivirusModel(VirusParams(d1, b1), VirusParams(d2, b2))


def load_model(path) -> BivirusModel:
    """Read a model JSON file; schema errors carry field context."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(
                f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: "
                f"{exc.msg}"
            ) from exc
    try:
        return model_from_dict(data)
    except ModelFormatError as exc:
        raise ModelFormatError(f"{path}: {exc}") from exc


def save_model(model: BivirusModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")


def model_hash(model: BivirusModel) -> str:
    """SHA-256 over the canonical JSON form; exact-entry identity key."""
    payload = json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def models_equal(a: BivirusModel, b: BivirusModel) -> bool:
    """Exact entrywise equality (models are inputs, not computed values)."""
    return (
        a.n == b.n
        and np.array_equal(a.virus1.d, b.virus1.d)
        and np.array_equal(a.virus2.d, b.virus2.d)
        and np.array_equal(a.virus1.b, b.virus1.b)
        and np.array_equal(a.virus2.b, b.virus2.b)
    )
