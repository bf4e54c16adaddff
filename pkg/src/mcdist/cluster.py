"""Dirichlet-cluster benchmark for stochastic-matrix distances.

Generates clusters of random stochastic matrices whose Dirichlet centers are
linearly interpolated toward a shared reference, clusters them with PAM
k-medoids under each distance, and scores recovery of the generating cluster
with the adjusted Rand index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from . import kernels
from .core import ProbabilityVector, StochasticMatrix
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    InfiniteDistance,
    LengthMismatch,
    NonPositiveAlpha,
    TooFewPoints,
    ValidationError,
)

_COST_TIE_TOL = 1e-12

__all__ = [
    "SimulationConfig",
    "SimulationResult",
    "ResultRow",
    "ContingencyTable",
    "DistanceMatrix",
    "sample_dirichlet",
    "sample_stochastic_matrix",
    "interpolate_alpha",
    "pairwise_distance_matrix",
    "cluster_k_medoids",
    "contingency",
    "adjusted_rand_index",
    "adjusted_rand_index_trace",
    "run_simulation",
]


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _check_alpha(alpha) -> NDArray[np.float64]:
    a = np.asarray(alpha, dtype=np.float64)
    if a.ndim != 1 or a.size == 0:
        raise DimensionMismatch("alpha must be a nonempty 1-d vector")
    if np.any(a <= 0.0):
        raise NonPositiveAlpha(f"alpha entries must be strictly positive, got {a}")
    return a


def sample_dirichlet(alpha, rng: np.random.Generator) -> ProbabilityVector:
    """Exact Dirichlet sample via normalized independent gamma draws."""
    a = _check_alpha(alpha)
    while True:
        g = rng.standard_gamma(a)
        s = g.sum()
        if s > 0.0:  # all-zero draws only occur for very small alpha
            return ProbabilityVector(g / s)


def sample_stochastic_matrix(alpha, rng: np.random.Generator) -> StochasticMatrix:
    """Square matrix with n independent Dirichlet(alpha) rows, n = len(alpha)."""
    a = _check_alpha(alpha)
    n = a.size
    rows = np.empty((n, n))
    for i in range(n):
        rows[i] = sample_dirichlet(a, rng).values
    return StochasticMatrix(rows)


def interpolate_alpha(alpha_k, alpha_0, t: float) -> NDArray[np.float64]:
    """Linear interpolation (1 - t) * alpha_k + t * alpha_0."""
    a, b = _check_alpha(alpha_k), _check_alpha(alpha_0)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape {a.shape} vs {b.shape}")
    return (1.0 - t) * a + t * b


# ---------------------------------------------------------------------------
# distance matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric nonnegative matrix of pairwise distances, zero diagonal."""

    entries: NDArray[np.float64]

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def _stack(matrices) -> NDArray[np.float64]:
    if isinstance(matrices, np.ndarray) and matrices.ndim == 3:
        return matrices.astype(np.float64, copy=False)
    rows = [m.rows if isinstance(m, StochasticMatrix) else np.asarray(m, dtype=np.float64) for m in matrices]
    return np.stack(rows)


def _batch_stationaries(mats: NDArray[np.float64]) -> NDArray[np.float64]:
    m, n, _ = mats.shape
    A = mats.transpose(0, 2, 1) - np.eye(n)[None, :, :]
    A[:, -1, :] = 1.0
    b = np.zeros((m, n, 1))
    b[:, -1, 0] = 1.0
    pis = np.linalg.solve(A, b)[:, :, 0]
    pis = np.clip(pis, 0.0, None)
    return pis / pis.sum(axis=1, keepdims=True)


def pairwise_distance_matrix(matrices, metric: str, smoothing: float = 0.0) -> DistanceMatrix:
    """Symmetric matrix of pairwise distances under one metric.

    ``smoothing`` adds a small constant to every entry before the symmetric KL
    rate (with row renormalization) to avoid +inf on zero entries; it is off
    by default and ignored by the other metrics.
    """
    arr = _stack(matrices)
    if arr.shape[0] < 2:
        raise DegenerateInput("need at least two matrices")
    if metric == "smd":
        D = kernels.pairwise_smd(arr)
    elif metric == "l1":
        D = kernels.pairwise_l1(arr)
    elif metric == "l2":
        D = kernels.pairwise_l2(arr)
    elif metric == "skl":
        if smoothing > 0.0:
            arr = arr + smoothing
            arr = arr / arr.sum(axis=2, keepdims=True)
        D = kernels.pairwise_sym_kl(arr, _batch_stationaries(arr))
        if not np.all(np.isfinite(D)):
            raise InfiniteDistance(
                "symmetric KL rate is infinite for some pair (enable smoothing to avoid this)"
            )
    else:
        raise ValidationError(f"unknown metric {metric!r}; expected one of smd, skl, l1, l2")
    np.fill_diagonal(D, 0.0)
    return DistanceMatrix(D)


# ---------------------------------------------------------------------------
# k-medoids
# ---------------------------------------------------------------------------

def _canonical_labels(labels: NDArray[np.int64]) -> NDArray[np.int64]:
    # Renumber clusters by first occurrence so labelings compare lexicographically.
    mapping: dict[int, int] = {}
    out = np.empty_like(labels)
    for i, lab in enumerate(labels):
        if int(lab) not in mapping:
            mapping[int(lab)] = len(mapping)
        out[i] = mapping[int(lab)]
    return out


def cluster_k_medoids(
    D, K: int, rng: np.random.Generator, restarts: int = 10
) -> NDArray[np.int64]:
    """PAM swap descent from ``restarts`` seeded initializations.

    Returns the labeling with minimal total within-cluster medoid cost; cost
    ties are broken toward the lexicographically least labeling.
    """
    E = D.entries if isinstance(D, DistanceMatrix) else np.asarray(D, dtype=np.float64)
    m = E.shape[0]
    if K < 1 or K > m:
        raise DegenerateInput(f"cannot form {K} clusters from {m} points")
    best_cost = np.inf
    best_labels: Optional[tuple[int, ...]] = None
    for _ in range(restarts):
        init = np.sort(rng.choice(m, size=K, replace=False)).astype(np.int64)
        medoids, cost = kernels.pam_descent(E, init)
        labels = _canonical_labels(E[:, medoids].argmin(axis=1))
        key = tuple(int(x) for x in labels)
        if cost < best_cost - _COST_TIE_TOL or (
            abs(cost - best_cost) <= _COST_TIE_TOL and (best_labels is None or key < best_labels)
        ):
            best_cost = cost
            best_labels = key
    assert best_labels is not None
    return np.asarray(best_labels, dtype=np.int64)


# ---------------------------------------------------------------------------
# contingency and adjusted Rand index
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Cross-tabulation of two labelings with its marginals."""

    counts: NDArray[np.int64]
    row_sums: NDArray[np.int64]
    col_sums: NDArray[np.int64]
    total: int


def contingency(a: Sequence[int], b: Sequence[int]) -> ContingencyTable:
    """Counts n_ij = |{p : a_p = i and b_p = j}| over the distinct labels."""
    av = np.asarray(a)
    bv = np.asarray(b)
    if av.shape != bv.shape or av.ndim != 1:
        raise LengthMismatch(f"label lists have shapes {av.shape} and {bv.shape}")
    _, ai = np.unique(av, return_inverse=True)
    _, bi = np.unique(bv, return_inverse=True)
    R = int(ai.max()) + 1
    C = int(bi.max()) + 1
    counts = np.zeros((R, C), dtype=np.int64)
    np.add.at(counts, (ai, bi), 1)
    return ContingencyTable(counts, counts.sum(axis=1), counts.sum(axis=0), int(av.size))


def _pair_counts(table: ContingencyTable) -> tuple[int, int, int, int]:
    N = table.total
    tbar = int((table.counts.astype(object) ** 2).sum())
    rbar = int((table.row_sums.astype(object) ** 2).sum())
    cbar = int((table.col_sums.astype(object) ** 2).sum())
    a = (tbar - N) // 2
    b = (rbar - tbar) // 2
    c = (cbar - tbar) // 2
    d = (tbar - rbar - cbar + N * N) // 2
    return a, b, c, d


def adjusted_rand_index(table: ContingencyTable) -> float:
    """Chance-corrected pair-count agreement 2(ad - bc) / ((a+b)(b+d) + (a+c)(c+d)).

    A zero denominator returns 1 when the clusterings agree on every pair and
    0 otherwise.
    """
    if table.total < 2:
        raise TooFewPoints("adjusted Rand index needs at least two points")
    a, b, c, d = _pair_counts(table)
    denom = (a + b) * (b + d) + (a + c) * (c + d)
    if denom == 0:
        return 1.0 if (b == 0 and c == 0) else 0.0
    return 2.0 * (a * d - b * c) / denom


def adjusted_rand_index_trace(table: ContingencyTable) -> float:
    """Diagnostic trace-form variant built from the same pair counts.

    Uses (C(N,2) tr M - tr(X M^2)) / (C(N,2)^2 - tr(X M^2)) with
    M = [[a, b], [c, d]] and X the 2x2 exchange matrix. Disagrees with the
    standard pair-count index (e.g. 1/7 vs -1/2 on the 4-point crossing
    labeling); reported side by side for comparison.
    """
    if table.total < 2:
        raise TooFewPoints("adjusted Rand index needs at least two points")
    a, b, c, d = _pair_counts(table)
    N = table.total
    binom = N * (N - 1) // 2
    tr_xm2 = (a * b + b * d) + (c * a + d * c)
    den = binom * binom - tr_xm2
    if den == 0:
        return 1.0 if (b == 0 and c == 0) else 0.0
    return (binom * (a + d) - tr_xm2) / den


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimulationConfig:
    """Inputs for the cluster-recovery benchmark.

    ``alphas[0]`` is the reference parameter vector the others are pulled
    toward; the state count equals the alpha dimension.
    """

    alphas: tuple[tuple[float, ...], ...]
    steps: int = 20          # interpolation steps T; the grid is {0, 1/T, ..., 1}
    repetitions: int = 50
    cluster_size: int = 20
    metrics: tuple[str, ...] = ("smd", "skl", "l1", "l2")
    seed: int = 0
    smoothing: float = 0.0

    def __post_init__(self) -> None:
        if len(self.alphas) < 2:
            raise ValidationError("need the reference alpha plus at least one cluster alpha")
        dims = {len(a) for a in self.alphas}
        if len(dims) != 1:
            raise DimensionMismatch("all alpha vectors must share one dimension")
        for a in self.alphas:
            _check_alpha(a)
        if self.steps < 1:
            raise ValidationError("steps must be >= 1")
        if self.repetitions < 1:
            raise ValidationError("repetitions must be >= 1")
        if self.cluster_size < 2:
            raise TooFewPoints("cluster_size must be >= 2")
        for m in self.metrics:
            if m not in ("smd", "skl", "l1", "l2"):
                raise ValidationError(f"unknown metric {m!r}")

    @property
    def state_count(self) -> int:
        return len(self.alphas[0])

    @property
    def cluster_count(self) -> int:
        return len(self.alphas)


@dataclass(frozen=True)
class ResultRow:
    t: float
    metric: str
    mean_ari: float
    std_ari: float
    reps: int


@dataclass(frozen=True)
class SimulationResult:
    rows: tuple[ResultRow, ...]

    def cell(self, t: float, metric: str) -> ResultRow:
        for row in self.rows:
            if row.metric == metric and abs(row.t - t) < 1e-12:
                return row
        raise KeyError((t, metric))


def _task_rng(seed: int, key: tuple[int, ...]) -> np.random.Generator:
    # Splittable stream: every task derives its generator from (seed, key),
    # so results are independent of execution order.
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def run_simulation(config: SimulationConfig, collect_samples: bool = False):
    """Run the full benchmark; deterministic given ``config.seed``.

    Returns a SimulationResult, plus a list of (t, cluster, rows) sample
    records from the first repetition when ``collect_samples`` is set.
    """
    T = config.steps
    Kp1 = config.cluster_count
    N = config.cluster_size
    alpha0 = np.asarray(config.alphas[0], dtype=np.float64)
    true_labels = np.repeat(np.arange(Kp1), N)
    scores: dict[tuple[int, str], list[float]] = {
        (ti, m): [] for ti in range(T + 1) for m in config.metrics
    }
    samples: list[tuple[float, int, NDArray[np.float64]]] = []
    for ti in range(T + 1):
        t = ti / T
        alphas_t = [interpolate_alpha(np.asarray(a), alpha0, t) for a in config.alphas]
        for r in range(config.repetitions):
            mats = np.empty((Kp1 * N, config.state_count, config.state_count))
            for k in range(Kp1):
                for i in range(N):
                    rng = _task_rng(config.seed, (0, ti, r, k, i))
                    m = sample_stochastic_matrix(alphas_t[k], rng)
                    mats[k * N + i] = m.rows
                    if collect_samples and r == 0:
                        samples.append((t, k, m.rows.copy()))
            for mi, metric in enumerate(config.metrics):
                D = pairwise_distance_matrix(mats, metric, smoothing=config.smoothing)
                labels = cluster_k_medoids(D, Kp1, _task_rng(config.seed, (1, ti, r, mi)))
                scores[(ti, metric)].append(adjusted_rand_index(contingency(true_labels, labels)))
    rows = []
    for ti in range(T + 1):
        t = ti / T
        for metric in sorted(config.metrics):
            vals = np.asarray(scores[(ti, metric)])
            rows.append(ResultRow(t, metric, float(vals.mean()), float(vals.std()), vals.size))
    rows.sort(key=lambda rr: (rr.t, rr.metric))
    result = SimulationResult(tuple(rows))
    if collect_samples:
        return result, samples
    return result
