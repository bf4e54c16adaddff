"""Core types and primitives for finite Markov chains.

Probability vectors, row-stochastic matrices, Hadamard geometric means,
chain-structure predicates (irreducibility, period, ergodicity, reversibility,
primitivity) and spectral machinery (spectral radius, biorthogonal
eigendecomposition, rate-case classification).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import acos, gcd, pi
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    DimensionMismatch,
    NegativeEntry,
    NotConverged,
    NotDiagonalisable,
    NotIrreducible,
    SingularSystem,
    SumOutOfTolerance,
)

SIMPLEX_TOL = 1e-9
EIGEN_UNIT_TOL = 1e-9      # |lambda - 1| below this counts as a unit eigenvalue
EIGEN_REAL_TOL = 1e-8
BIORTHO_COND_CAP = 1e8     # eigenbasis condition number above this -> not diagonalisable

__all__ = [
    "ProbabilityVector",
    "StochasticMatrix",
    "NonNegativeMatrix",
    "MarkovChain",
    "SpectralDecomposition",
    "RateCase",
    "make_probability_vector",
    "make_stochastic_matrix",
    "bhattacharyya_coefficient",
    "bhattacharyya_angle",
    "hadamard_geometric_mean_vector",
    "hadamard_geometric_mean_matrix",
    "stationary_distribution",
    "is_irreducible",
    "period",
    "is_aperiodic",
    "is_ergodic",
    "is_reversible",
    "is_primitive",
    "spectral_radius",
    "eigen_decompose",
    "classify_rate_case",
]


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    """Point on the probability simplex; entries are renormalized to sum to 1."""

    values: NDArray[np.float64]

    @property
    def dim(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Square row-stochastic matrix with optional state labels."""

    rows: NDArray[np.float64]
    labels: Optional[tuple[str, ...]] = None

    @property
    def n(self) -> int:
        return self.rows.shape[0]


@dataclass(frozen=True, eq=False)
class NonNegativeMatrix:
    """Square nonnegative matrix with row sums at most 1 (sub-stochastic)."""

    entries: NDArray[np.float64]

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class MarkovChain:
    """Initial distribution plus a row-stochastic transition matrix."""

    initial: ProbabilityVector
    matrix: StochasticMatrix

    def __post_init__(self) -> None:
        if self.initial.dim != self.matrix.n:
            raise DimensionMismatch(
                f"initial distribution has dimension {self.initial.dim}, "
                f"matrix is {self.matrix.n}x{self.matrix.n}"
            )


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues with biorthogonal right/left eigenvectors.

    Column i of ``right`` is the right eigenvector p_i, column i of ``left``
    the left eigenvector q_i, normalized so q_i^T p_j = [i = j].
    """

    eigenvalues: NDArray[np.complex128]
    right: NDArray[np.complex128]
    left: NDArray[np.complex128]
    residual: float


@dataclass(frozen=True)
class RateCase:
    """Classification of a Hadamard-mean matrix for the infinite-run distance."""

    tag: str  # one of "type1", "type2", "subunit", "unsupported"
    unit_indices: tuple[int, ...] = ()
    reason: str = ""

    def __post_init__(self) -> None:
        if self.tag == "type1" and not self.unit_indices:
            raise ValueError("type1 classification requires unit eigenvalue indices")


# ---------------------------------------------------------------------------
# coercion helpers
# ---------------------------------------------------------------------------

def _as_vector(p) -> NDArray[np.float64]:
    v = p.values if isinstance(p, ProbabilityVector) else np.asarray(p, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-d vector, got shape {v.shape}")
    return v


def _as_matrix(P) -> NDArray[np.float64]:
    if isinstance(P, StochasticMatrix):
        return P.rows
    if isinstance(P, NonNegativeMatrix):
        return P.entries
    if isinstance(P, MarkovChain):
        return P.matrix.rows
    A = np.asarray(P, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    return A


def _check_same_dim(a: NDArray, b: NDArray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape {a.shape} vs {b.shape}")


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------

def make_probability_vector(values: Sequence[float], tol: float = SIMPLEX_TOL) -> ProbabilityVector:
    """Validate and renormalize a probability vector.

    Raises
    ------
    NegativeEntry
        If any entry is below zero.
    SumOutOfTolerance
        If the entries do not sum to 1 within ``tol``.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise DimensionMismatch("probability vector must be a nonempty 1-d sequence")
    if np.any(v < 0.0):
        i = int(np.argmin(v))
        raise NegativeEntry(f"entry {i} is negative: {v[i]}")
    s = float(v.sum())
    if abs(s - 1.0) > tol:
        raise SumOutOfTolerance(f"entries sum to {s!r}, outside tolerance {tol}")
    return ProbabilityVector(v / s)


def make_stochastic_matrix(
    rows: Sequence[Sequence[float]],
    labels: Optional[Sequence[str]] = None,
    tol: float = SIMPLEX_TOL,
) -> StochasticMatrix:
    """Validate a square row-stochastic matrix; each row is renormalized."""
    A = np.asarray(rows, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    out = np.empty_like(A)
    for i in range(A.shape[0]):
        try:
            out[i] = make_probability_vector(A[i], tol=tol).values
        except (NegativeEntry, SumOutOfTolerance) as exc:
            raise type(exc)(f"row {i}: {exc}") from None
    lab = None
    if labels is not None:
        lab = tuple(str(s) for s in labels)
        if len(lab) != A.shape[0]:
            raise DimensionMismatch(f"{len(lab)} labels for a {A.shape[0]}-state matrix")
    return StochasticMatrix(out, lab)


# ---------------------------------------------------------------------------
# Bhattacharyya primitives
# ---------------------------------------------------------------------------

def bhattacharyya_coefficient(p, q) -> float:
    """Overlap sum_i sqrt(p_i q_i), clamped into [0, 1].

    Evaluated through the Hellinger form 1 - sum_i (sqrt(p_i) - sqrt(q_i))^2 / 2,
    which is exact for identical inputs and well conditioned near 1, where the
    direct product sum loses the digits arccos needs.
    """
    pv, qv = _as_vector(p), _as_vector(q)
    _check_same_dim(pv, qv)
    h2 = float(((np.sqrt(pv) - np.sqrt(qv)) ** 2).sum())
    return min(max(1.0 - 0.5 * h2, 0.0), 1.0)


def bhattacharyya_angle(p, q) -> float:
    """Geodesic (Fisher-Rao) distance 2*arccos(BC) between categorical laws."""
    return 2.0 * acos(bhattacharyya_coefficient(p, q))


def hadamard_geometric_mean_vector(pi1, pi2) -> NDArray[np.float64]:
    """Componentwise sqrt(pi1_i * pi2_i); sums to BC(pi1, pi2) <= 1."""
    a, b = _as_vector(pi1), _as_vector(pi2)
    _check_same_dim(a, b)
    return np.sqrt(a * b)


def hadamard_geometric_mean_matrix(P1, P2) -> NonNegativeMatrix:
    """Componentwise sqrt(P1_ij * P2_ij); rows are sub-stochastic by Cauchy-Schwarz."""
    A, B = _as_matrix(P1), _as_matrix(P2)
    _check_same_dim(A, B)
    return NonNegativeMatrix(np.sqrt(A * B))


# ---------------------------------------------------------------------------
# stationary distribution
# ---------------------------------------------------------------------------

_STATIONARY_RESIDUAL = 1e-10


def stationary_distribution(P) -> ProbabilityVector:
    """Solve pi^T P = pi^T with sum(pi) = 1.

    Dense linear solve with one balance equation replaced by the normalization
    constraint; falls back to power iteration on irreducible inputs when the
    direct solve fails to working precision.
    """
    A = _as_matrix(P)
    n = A.shape[0]
    M = A.T - np.eye(n)
    M[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = None
    try:
        cand = np.linalg.solve(M, b)
        if np.all(np.isfinite(cand)) and cand.min() > -1e-8:
            cand = np.clip(cand, 0.0, None)
            cand /= cand.sum()
            if float(np.max(np.abs(cand @ A - cand))) <= _STATIONARY_RESIDUAL:
                pi = cand
    except np.linalg.LinAlgError:
        pass
    if pi is None:
        if not is_irreducible(A):
            raise SingularSystem("no unique stationary distribution (matrix not irreducible)")
        pi = _stationary_power_iteration(A)
    return ProbabilityVector(pi)


def _stationary_power_iteration(A: NDArray[np.float64], max_iter: int = 2_000_000) -> NDArray[np.float64]:
    n = A.shape[0]
    v = np.full(n, 1.0 / n)
    # Lazy chain (I + P)/2 kills periodicity without moving the fixed point.
    B = 0.5 * (A + np.eye(n))
    for _ in range(max_iter):
        w = v @ B
        w /= w.sum()
        if float(np.max(np.abs(w - v))) < 1e-15:
            v = w
            break
        v = w
    if float(np.max(np.abs(v @ A - v))) > _STATIONARY_RESIDUAL:
        raise NotConverged("power iteration did not reach the stationary residual target")
    return v


# ---------------------------------------------------------------------------
# chain-structure predicates
# ---------------------------------------------------------------------------

def _support(P) -> NDArray[np.bool_]:
    return _as_matrix(P) > 0.0


def is_irreducible(P) -> bool:
    """True iff the support digraph is strongly connected."""
    S = _support(P)
    ncomp, _ = connected_components(csr_matrix(S), directed=True, connection="strong")
    return int(ncomp) == 1


def period(P) -> int:
    """gcd of directed cycle lengths in the support digraph (irreducible only)."""
    S = _support(P)
    if not is_irreducible(S):
        raise NotIrreducible("period is defined for irreducible matrices only")
    n = S.shape[0]
    level = np.full(n, -1, dtype=np.int64)
    level[0] = 0
    queue = [0]
    g = 0
    while queue:
        u = queue.pop()
        for v in np.flatnonzero(S[u]):
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(int(v))
            else:
                g = gcd(g, int(level[u] + 1 - level[v]))
    return abs(g) if g != 0 else 1


def is_aperiodic(P) -> bool:
    return period(P) == 1


def is_ergodic(P) -> bool:
    """Irreducible and aperiodic."""
    return is_irreducible(P) and is_aperiodic(P)


def is_reversible(P, pi, tol: float = 1e-10) -> bool:
    """Detailed balance: max_ij |pi_i P_ij - pi_j P_ji| <= tol."""
    A = _as_matrix(P)
    v = _as_vector(pi)
    if v.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"pi has dimension {v.shape[0]}, matrix is {A.shape[0]}x{A.shape[0]}")
    F = v[:, None] * A
    return float(np.max(np.abs(F - F.T))) <= tol


def is_primitive(R) -> bool:
    """Support-pattern primitivity via the Wielandt exponent (n-1)^2 + 1.

    Boolean matrix powers avoid the floating-point underflow a numeric power
    test would suffer.
    """
    S = _support(R)
    n = S.shape[0]
    if not S.any():
        return False
    exponent = (n - 1) ** 2 + 1
    result = np.eye(n, dtype=bool)
    base = S
    e = exponent
    while e > 0:
        if e & 1:
            result = (result.astype(np.int64) @ base.astype(np.int64)) > 0
        base = (base.astype(np.int64) @ base.astype(np.int64)) > 0
        e >>= 1
    return bool(result.all())


# ---------------------------------------------------------------------------
# spectral machinery
# ---------------------------------------------------------------------------

def spectral_radius(R, tol: float = 1e-12, max_iter: int = 500_000) -> float:
    """Spectral radius of a nonnegative matrix by power iteration.

    Plain power iteration first; a diagonal-shift pass (R + I) breaks the
    oscillation of imprimitive support patterns. The all-ones start vector is
    an exact fixed point for stochastic R, so the common case is instant.
    """
    A = _as_matrix(R)
    if np.any(A < 0.0):
        raise NegativeEntry("spectral_radius expects a nonnegative matrix")
    if not A.any():
        return 0.0
    est = _power_iteration_radius(A, tol, max_iter)
    if est is not None:
        return est
    est = _power_iteration_radius(A + np.eye(A.shape[0]), tol, max_iter)
    if est is not None:
        return est - 1.0
    raise NotConverged("power iteration failed to converge on R and on R + I")


def _power_iteration_radius(A: NDArray[np.float64], tol: float, max_iter: int) -> Optional[float]:
    n = A.shape[0]
    v = np.full(n, 1.0 / n)
    lam_prev = -1.0
    stable = 0
    for _ in range(max_iter):
        w = A @ v
        lam = float(np.max(np.abs(w))) / float(np.max(np.abs(v)))
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0  # v fell into the kernel; nilpotent direction
        v = w / nw
        if abs(lam - lam_prev) <= tol * max(1.0, lam):
            stable += 1
            if stable >= 3:
                return lam
        else:
            stable = 0
        lam_prev = lam
    return None


def eigen_decompose(R) -> SpectralDecomposition:
    """Full biorthogonal eigendecomposition of a square matrix.

    Left eigenvectors are taken from the inverse of the right eigenbasis, so
    q_i^T p_j = [i = j] holds by construction. Diagonalisability is judged by
    the condition number of the eigenbasis (cap 1e8).
    """
    A = _as_matrix(R)
    w, V = np.linalg.eig(A)
    # Deterministic ordering: descending modulus, then descending real part.
    order = np.lexsort((-w.real, -np.abs(w)))
    w = w[order]
    V = V[:, order]
    cond = float(np.linalg.cond(V))
    if not np.isfinite(cond) or cond > BIORTHO_COND_CAP:
        raise NotDiagonalisable(
            f"eigenbasis condition number {cond:.3e} exceeds cap {BIORTHO_COND_CAP:.0e}"
        )
    L = np.linalg.inv(V).T  # column i is the left eigenvector q_i
    residual = float(np.max(np.abs(A @ V - V * w[None, :])))
    if residual > 1e-8:
        raise NotConverged(f"eigenpair residual {residual:.3e} exceeds 1e-8")
    return SpectralDecomposition(w, V, L, residual)


def classify_rate_case(R, unit_tol: float = EIGEN_UNIT_TOL) -> RateCase:
    """Classify a Hadamard-mean matrix for the closed-form infinite-run distance.

    SubUnit when rho(R) < 1 - unit_tol; Type2 when rho(R) = 1 and R is
    primitive; Type1 when R is diagonalisable with real eigenvalues, all
    above -1, and rho(R) = 1; Unsupported otherwise.
    """
    A = _as_matrix(R)
    rho = spectral_radius(A)
    if rho < 1.0 - unit_tol:
        return RateCase("subunit")
    if is_primitive(A):
        return RateCase("type2")
    try:
        dec = eigen_decompose(A)
    except NotDiagonalisable as exc:
        return RateCase("unsupported", reason=str(exc))
    w = dec.eigenvalues
    if float(np.max(np.abs(w.imag))) > EIGEN_REAL_TOL:
        return RateCase("unsupported", reason="complex eigenvalues present")
    if float(np.min(w.real)) <= -1.0 + unit_tol:
        return RateCase("unsupported", reason="eigenvalue at or below -1")
    idx = tuple(int(i) for i in np.flatnonzero(np.abs(w - 1.0) <= unit_tol))
    if not idx:
        return RateCase("unsupported", reason="no unit eigenvalue despite rho(R) = 1")
    return RateCase("type1", unit_indices=idx)
