"""Distances on the space of stochastic matrices.

The product-metric stochastic matrix distance, its ergodic limit (the
Bhattacharyya angle between stationary laws), and the baseline distances used
by the clustering benchmark: symmetric KL divergence rate and entrywise
L1/L2 norms.
"""

from __future__ import annotations

import math

import numpy as np

from .core import (
    bhattacharyya_coefficient,
    is_ergodic,
    stationary_distribution,
    _as_matrix,
)
from .errors import DimensionMismatch, NotErgodic

METRICS = ("smd", "skl", "l1", "l2")

__all__ = [
    "METRICS",
    "stochastic_matrix_distance",
    "ergodic_distance",
    "sym_kl_rate",
    "l1_matrix_distance",
    "l2_matrix_distance",
]


def _pair(P1, P2):
    A, B = _as_matrix(P1), _as_matrix(P2)
    if A.shape != B.shape:
        raise DimensionMismatch(f"shape {A.shape} vs {B.shape}")
    return A, B


def stochastic_matrix_distance(P1, P2) -> float:
    """Product-metric distance 2*sqrt(sum_i arccos^2(row-wise BC)).

    Valid for any pair of row-stochastic matrices; no ergodicity needed.
    """
    A, B = _pair(P1, P2)
    # Hellinger form of the row BC: exact 1 for identical rows, so the
    # self-distance is exactly zero despite arccos being steep near 1.
    h2 = ((np.sqrt(A) - np.sqrt(B)) ** 2).sum(axis=1)
    bc = np.clip(1.0 - 0.5 * h2, 0.0, 1.0)
    return 2.0 * math.sqrt(float((np.arccos(bc) ** 2).sum()))


def ergodic_distance(M1, M2) -> float:
    """Bhattacharyya angle between the unique stationary distributions.

    Initial distributions are ignored; both chains must be ergodic.
    """
    A, B = _pair(M1, M2)
    if not is_ergodic(A) or not is_ergodic(B):
        raise NotErgodic("ergodic distance requires both chains to be ergodic")
    pi1 = stationary_distribution(A)
    pi2 = stationary_distribution(B)
    return 2.0 * math.acos(bhattacharyya_coefficient(pi1, pi2))


def sym_kl_rate(M1, M2) -> float:
    """Stationary-weighted symmetric Kullback-Leibler divergence rate.

    sum_i pi1(i) KL(P1_i || P2_i) + sum_i pi2(i) KL(P2_i || P1_i). A positive
    P1 entry over a zero P2 entry (or vice versa) yields +inf.
    """
    A, B = _pair(M1, M2)
    if not is_ergodic(A) or not is_ergodic(B):
        raise NotErgodic("symmetric KL rate requires both chains to be ergodic")
    pi1 = stationary_distribution(A).values
    pi2 = stationary_distribution(B).values
    return _kl_rate(A, B, pi1) + _kl_rate(B, A, pi2)


def _kl_rate(A, B, pi):
    if np.any((A > 0.0) & (B <= 0.0)):
        return math.inf
    term = np.where(A > 0.0, A * np.log(np.where(A > 0.0, A, 1.0) / np.where(B > 0.0, B, 1.0)), 0.0)
    return float(pi @ term.sum(axis=1))


def l1_matrix_distance(P1, P2) -> float:
    """Entrywise L1 distance sum_ij |P1_ij - P2_ij|."""
    A, B = _pair(P1, P2)
    return float(np.abs(A - B).sum())


def l2_matrix_distance(P1, P2) -> float:
    """Entrywise (Frobenius) L2 distance sqrt(sum_ij (P1_ij - P2_ij)^2)."""
    A, B = _pair(P1, P2)
    return float(np.sqrt(((A - B) ** 2).sum()))
