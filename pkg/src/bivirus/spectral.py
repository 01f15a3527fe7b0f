"""Dense real-matrix spectral computations.

Everything downstream (assumption checks, equilibrium classification,
stability shortcuts) reduces to a handful of primitives over small dense
matrices: full eigendecompositions, spectral radii of irreducible
nonnegative matrices, Perron eigenpairs of irreducible Metzler matrices,
an irreducibility test, and an LU-based determinant sign that is
independent of the eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, EigenSolverError, PreconditionError

# A dominant eigenvalue closer than this (in real part) to the rest of the
# spectrum is treated as non-simple.
SIMPLICITY_GAP = 1e-8

_POWER_TOL = 1e-14
_POWER_MAX_ITER = 20_000


@dataclass(frozen=True)
class Spectrum:
    """Full eigenvalue set of a real square matrix.

    eigenvalues keeps the solver's order; abscissa is the largest real
    part, radius the largest modulus.
    """

    eigenvalues: np.ndarray
    abscissa: float
    radius: float

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise PreconditionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise PreconditionError("matrix entries must be finite")
    return a


def eigenvalues(m) -> Spectrum:
    """All eigenvalues of a real square matrix via the dense QR eigensolver.

    Complex eigenvalues of real input come out in conjugate pairs. A
    non-converged factorization raises EigenSolverError carrying the
    matrix.
    """
    a = _as_square(m)
    try:
        vals = np.linalg.eigvals(a).astype(complex)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigensolver did not converge: {exc}", matrix=a) from exc
    return Spectrum(
        eigenvalues=vals,
        abscissa=float(np.max(vals.real)),
        radius=float(np.max(np.abs(vals))),
    )


def irreducible(m) -> bool:
    """Whether a nonnegative matrix is irreducible.

    Checked as strong connectivity of the digraph with an edge (j, i) for
    every m[i, j] > 0, by forward and backward reachability from node 0.
    A 1x1 matrix counts as strongly connected.
    """
    a = _as_square(m)
    if np.min(a) < 0:
        raise PreconditionError("irreducibility test requires a nonnegative matrix")
    adj = a > 0
    return _reachable_all(adj) and _reachable_all(adj.T)


def _reachable_all(adj: np.ndarray) -> bool:
    # BFS from node 0 over boolean adjacency; adj[i, j] means j -> i.
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    frontier = [0]
    while frontier:
        j = frontier.pop()
        new = adj[:, j] & ~seen
        for i in np.nonzero(new)[0]:
            seen[i] = True
            frontier.append(int(i))
    return bool(seen.all())


def _power_dominant(a: np.ndarray):
    """Dominant eigenpair of a primitive nonnegative matrix.

    Returns (value, vector, converged). The vector is positive with unit
    entry sum.
    """
    n = a.shape[0]
    v = np.full(n, 1.0 / n)
    lam = 0.0
    for _ in range(_POWER_MAX_ITER):
        w = a @ v
        s = float(w.sum())
        if s <= 0.0:
            return 0.0, v, False
        w /= s
        if abs(s - lam) <= _POWER_TOL * max(1.0, abs(s)) and float(
            np.max(np.abs(w - v))
        ) <= _POWER_TOL:
            return s, w, True
        lam, v = s, w
    return lam, v, False


def _perron_gap_check(vals: np.ndarray, value: float) -> None:
    rest = vals[np.argsort(-vals.real)][1:]
    if rest.size and value - float(np.max(rest.real)) < SIMPLICITY_GAP:
        raise DegeneracyError(
            f"dominant eigenvalue {value} is not simple within gap "
            f"{SIMPLICITY_GAP}",
            eigenvalues=vals,
        )


def spectral_radius_nonneg(m) -> float:
    """Spectral radius of a nonnegative irreducible matrix.

    Power iteration on the primitive shift m + I, with the full
    eigendecomposition as fallback when the iteration stalls (periodic or
    nearly periodic matrices).
    """
    a = _as_square(m)
    if np.min(a) < 0:
        raise PreconditionError("matrix must be entrywise nonnegative")
    if not irreducible(a):
        raise PreconditionError("matrix must be irreducible")
    value, _, ok = _power_dominant(a + np.eye(a.shape[0]))
    if not ok:
        return eigenvalues(a).radius
    return value - 1.0


def perron_vectors(m):
    """Perron value and positive left/right eigenvectors of an irreducible
    Metzler matrix.

    Returns (value, right, left) with value = the spectral abscissa,
    vectors strictly positive and normalized to unit sum. Raises
    DegeneracyError if the dominant eigenvalue is not simple within
    SIMPLICITY_GAP.
    """
    a = _as_square(m)
    off = a - np.diag(np.diag(a))
    if np.min(off) < 0:
        raise PreconditionError("matrix must be Metzler (nonnegative off-diagonal)")
    if not irreducible(np.maximum(off, 0.0)):
        raise PreconditionError("matrix must be irreducible")

    # Shift to a primitive nonnegative matrix; the Perron root shifts by c.
    c = max(0.0, -float(np.min(np.diag(a)))) + 1.0
    shifted = a + c * np.eye(a.shape[0])
    val_r, right, ok_r = _power_dominant(shifted)
    val_l, left, ok_l = _power_dominant(shifted.T)

    vals = eigenvalues(a).eigenvalues
    if not (ok_r and ok_l):
        value = float(np.max(vals.real))
        right = _positive_eigvec(a, value)
        left = _positive_eigvec(a.T, value)
    else:
        value = 0.5 * (val_r + val_l) - c
    _perron_gap_check(vals, value)

    if np.min(right) <= 0 or np.min(left) <= 0:
        raise DegeneracyError(
            "Perron eigenvectors not strictly positive; dominant pair is "
            "numerically degenerate",
            eigenvalues=vals,
        )
    return value, right, left


def _positive_eigvec(a: np.ndarray, value: float) -> np.ndarray:
    vals, vecs = np.linalg.eig(a)
    idx = int(np.argmin(np.abs(vals - value)))
    v = vecs[:, idx].real
    s = v.sum()
    if s < 0:
        v = -v
        s = -s
    if s <= 0:
        raise DegeneracyError(
            f"could not extract a positive eigenvector for value {value}",
            eigenvalues=vals,
        )
    return v / s


def det_sign_lu(m) -> int:
    """Sign of det(m) from an LU factorization with partial pivoting.

    Deliberately independent of the eigensolver; used to cross-check
    equilibrium indices.
    """
    a = _as_square(m).copy()
    n = a.shape[0]
    sign = 1
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0.0:
            return 0
        if p != k:
            a[[k, p]] = a[[p, k]]
            sign = -sign
        if a[k, k] < 0:
            sign = -sign
        a[k + 1 :, k] /= a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k, k + 1 :])
    return sign
