"""Bhattacharyya distances on n-step sequence spaces.

The exact matrix form 2*arccos(r^T R^(n-1) 1), a brute-force enumeration
oracle over explicit words, and the closed-form infinite-run rate.

Convention: words of length n use the exponent n - 1 (one factor of R per
transition). The enumeration oracle fixes this convention; asymptotics are
unaffected.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import acos, pi
from typing import Optional, Sequence

import numpy as np

from .core import (
    MarkovChain,
    RateCase,
    classify_rate_case,
    eigen_decompose,
    hadamard_geometric_mean_matrix,
    hadamard_geometric_mean_vector,
    spectral_radius,
)
from .errors import (
    DimensionMismatch,
    EnumerationTooLarge,
    IndexOutOfRange,
    NotConverged,
    UnsupportedSpectrum,
)

ENUMERATION_CAP = 10_000_000

__all__ = [
    "RateResult",
    "sequence_probability",
    "sequence_distance",
    "sequence_distance_bruteforce",
    "bhattacharyya_rate",
]


@dataclass(frozen=True)
class RateResult:
    """Infinite-run Bhattacharyya distance with its classification."""

    value: float
    case: RateCase
    rho: float
    residual: Optional[float] = None


def _clamp01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def sequence_probability(M: MarkovChain, word: Sequence[int]) -> float:
    """Probability pi(x_1) * prod_t P(x_t, x_{t+1}) of observing a trace."""
    w = np.asarray(word, dtype=np.int64)
    if w.ndim != 1 or w.size == 0:
        raise IndexOutOfRange("word must be a nonempty index sequence")
    n = M.matrix.n
    if w.min() < 0 or w.max() >= n:
        raise IndexOutOfRange(f"word indices must lie in [0, {n})")
    p = float(M.initial.values[w[0]])
    P = M.matrix.rows
    for t in range(w.size - 1):
        p *= float(P[w[t], w[t + 1]])
    return p


def _hadamard_pair(M1: MarkovChain, M2: MarkovChain):
    if M1.matrix.n != M2.matrix.n:
        raise DimensionMismatch(
            f"state counts differ: {M1.matrix.n} vs {M2.matrix.n}"
        )
    r = hadamard_geometric_mean_vector(M1.initial, M2.initial)
    R = hadamard_geometric_mean_matrix(M1.matrix, M2.matrix).entries
    return r, R


def sequence_distance(M1: MarkovChain, M2: MarkovChain, n: int) -> float:
    """Bhattacharyya angle between the length-n sequence distributions.

    Computed as 2*arccos(r^T R^(n-1) 1) by n - 1 vector-matrix products.
    """
    if n < 1:
        raise DimensionMismatch("word length n must be >= 1")
    r, R = _hadamard_pair(M1, M2)
    v = r.copy()
    for _ in range(n - 1):
        v = v @ R
    return 2.0 * acos(_clamp01(float(v.sum())))


def sequence_distance_bruteforce(
    M1: MarkovChain, M2: MarkovChain, n: int, cap: int = ENUMERATION_CAP
) -> float:
    """Enumeration oracle: sum sqrt(p1(w) p2(w)) over every word of length n.

    Word probabilities for the two chains are accumulated independently; no
    Hadamard-mean shortcut is taken.
    """
    if n < 1:
        raise DimensionMismatch("word length n must be >= 1")
    k = M1.matrix.n
    if M2.matrix.n != k:
        raise DimensionMismatch(f"state counts differ: {k} vs {M2.matrix.n}")
    if k ** n > cap:
        raise EnumerationTooLarge(f"{k}^{n} words exceed the cap {cap}")
    P1, P2 = M1.matrix.rows, M2.matrix.rows
    # Arrays over all length-t prefixes; `last` tracks each prefix's final state.
    p1 = M1.initial.values.copy()
    p2 = M2.initial.values.copy()
    last = np.arange(k)
    for _ in range(n - 1):
        p1 = (p1[:, None] * P1[last, :]).ravel()
        p2 = (p2[:, None] * P2[last, :]).ravel()
        last = np.tile(np.arange(k), last.size)
    bc = float(np.sqrt(p1 * p2).sum())
    return 2.0 * acos(_clamp01(bc))


def _perron_pair(R: np.ndarray):
    """Right/left Perron vectors of a primitive matrix, scaled so q^T p = 1."""
    wr, Vr = np.linalg.eig(R)
    i = int(np.argmax(wr.real - np.abs(wr.imag)))
    p = Vr[:, i].real
    wl, Vl = np.linalg.eig(R.T)
    j = int(np.argmax(wl.real - np.abs(wl.imag)))
    q = Vl[:, j].real
    if p.sum() < 0:
        p = -p
    scale = float(q @ p)
    if scale == 0.0:
        raise NotConverged("degenerate Perron pair")
    q = q / scale
    return p, q


def bhattacharyya_rate(M1: MarkovChain, M2: MarkovChain) -> RateResult:
    """Closed-form limit of sequence_distance as the word length grows.

    SubUnit spectra give exactly pi; primitive (Type 2) and real-diagonalisable
    (Type 1) spectra use the surviving eigenprojections of the Hadamard-mean
    matrix. Anything else raises UnsupportedSpectrum.
    """
    r, R = _hadamard_pair(M1, M2)
    rho = spectral_radius(R)
    case = classify_rate_case(R)
    if case.tag == "subunit":
        return RateResult(pi, case, rho)
    if case.tag == "type2":
        p, q = _perron_pair(R)
        inner = float((r @ p) * q.sum())
        return RateResult(2.0 * acos(_clamp01(inner)), case, rho)
    if case.tag == "type1":
        dec = eigen_decompose(R)
        inner = 0.0
        for i in case.unit_indices:
            inner += float(((r @ dec.right[:, i]) * dec.left[:, i].sum()).real)
        return RateResult(2.0 * acos(_clamp01(inner)), case, rho, dec.residual)
    raise UnsupportedSpectrum(case.reason or "spectrum outside the supported classes")
