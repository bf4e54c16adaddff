"""Bhattacharyya-induced mixing times.

Exact mixing time by upward scan, the spectral representation of P^tau for
reversible ergodic chains, and analytic lower/upper bounds on the mixing time.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, cos, log
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .core import (
    ProbabilityVector,
    bhattacharyya_angle,
    is_ergodic,
    is_reversible,
    stationary_distribution,
    _as_matrix,
)
from .errors import (
    CapExceeded,
    DegenerateSpectrum,
    IndexOutOfRange,
    NotErgodic,
    NotReversible,
    ZeroStationaryMass,
)

__all__ = [
    "MixingBounds",
    "ReversibleSpectrum",
    "distribution_at",
    "reversible_spectrum",
    "transition_power_spectral",
    "mixing_time_exact",
    "mixing_bounds",
    "random_reversible_chain",
    "remainder_constant",
]


def remainder_constant() -> float:
    """Taylor-remainder safety constant 1 - (5/16)^(2/7) used by the lower bound."""
    return 1.0 - (5.0 / 16.0) ** (2.0 / 7.0)


@dataclass(frozen=True)
class MixingBounds:
    """Analytic sandwich [tau_minus, tau_plus] around the exact mixing time."""

    lambda_max: float
    pi_min: float
    tau_minus: int
    tau_plus: int
    epsilon: float
    gamma: float


@dataclass(frozen=True, eq=False)
class ReversibleSpectrum:
    """Real spectrum of a reversible ergodic chain, sorted descending.

    Column i of ``basis`` is the orthonormal vector e^(i) of the symmetrized
    matrix; e^(1) equals the entrywise square root of the stationary law.
    """

    eigenvalues: NDArray[np.float64]
    basis: NDArray[np.float64]
    stationary: ProbabilityVector


def distribution_at(P, start: int, tau: int) -> ProbabilityVector:
    """Row vector e_start^T P^tau via tau successive vector-matrix products."""
    A = _as_matrix(P)
    n = A.shape[0]
    if not 0 <= start < n:
        raise IndexOutOfRange(f"start state {start} outside [0, {n})")
    if tau < 0:
        raise IndexOutOfRange("tau must be nonnegative")
    v = np.zeros(n)
    v[start] = 1.0
    for _ in range(tau):
        v = v @ A
    v = np.clip(v, 0.0, None)  # stray -1e-16 from rounding
    return ProbabilityVector(v / v.sum())


def reversible_spectrum(P, balance_tol: float = 1e-10) -> ReversibleSpectrum:
    """Eigen-system of D^(1/2) P D^(-1/2) for a reversible ergodic chain.

    The conjugated matrix is symmetric exactly when detailed balance holds, so
    its eigenvalues are the real spectrum of P and its orthonormal eigenvectors
    give the spectral form of P^tau.
    """
    A = _as_matrix(P)
    if not is_ergodic(A):
        raise NotErgodic("reversible spectrum requires an irreducible aperiodic chain")
    pi = stationary_distribution(A).values
    if pi.min() <= 0.0:
        raise ZeroStationaryMass("stationary distribution has a zero entry")
    if not is_reversible(A, pi, tol=balance_tol):
        raise NotReversible(f"detailed balance violated beyond {balance_tol}")
    d = np.sqrt(pi)
    S = (d[:, None] * A) / d[None, :]
    S = 0.5 * (S + S.T)  # kill the O(1e-13) asymmetry left by conjugation
    w, E = np.linalg.eigh(S)
    order = np.argsort(w)[::-1]
    w = w[order]
    E = E[:, order]
    # Fix signs: leading vector aligned with sqrt(pi), others by largest entry.
    for i in range(E.shape[1]):
        ref = float(d @ E[:, 0]) if i == 0 else float(E[np.argmax(np.abs(E[:, i])), i])
        if ref < 0:
            E[:, i] = -E[:, i]
    return ReversibleSpectrum(w, E, ProbabilityVector(pi))


def transition_power_spectral(spec: ReversibleSpectrum, tau: int) -> NDArray[np.float64]:
    """Reconstruct P^tau from a reversible spectrum.

    P^tau(j, k) = pi(k) + sqrt(pi(k)/pi(j)) * sum_{i>=2} lambda_i^tau e_j^(i) e_k^(i)
    """
    pi = spec.stationary.values
    d = np.sqrt(pi)
    w = spec.eigenvalues
    E = spec.basis
    tail = (E[:, 1:] * w[1:] ** tau) @ E[:, 1:].T
    return pi[None, :] + (d[None, :] / d[:, None]) * tail


def mixing_time_exact(P, start: int, epsilon: float, cap: int = 1_000_000) -> int:
    """Smallest tau > 0 whose tau-step distribution is within epsilon of stationarity.

    The angle is not proven monotone in tau, so this is a plain upward scan
    returning the first crossing.
    """
    A = _as_matrix(P)
    if epsilon <= 0.0:
        raise IndexOutOfRange("epsilon must be positive")
    if not is_ergodic(A):
        raise NotErgodic("mixing time requires an ergodic chain")
    pi = stationary_distribution(A)
    n = A.shape[0]
    if not 0 <= start < n:
        raise IndexOutOfRange(f"start state {start} outside [0, {n})")
    v = np.zeros(n)
    v[start] = 1.0
    for tau in range(1, cap + 1):
        v = v @ A
        if bhattacharyya_angle(pi.values, np.clip(v, 0.0, None) / v.sum()) <= epsilon:
            return tau
    raise CapExceeded(f"no crossing below epsilon={epsilon} within {cap} steps")


def mixing_bounds(P, epsilon: float) -> MixingBounds:
    """Analytic mixing-time bounds for a reversible ergodic chain.

    tau_minus depends only on the spectrum and stationary floor; tau_plus also
    on the target angle epsilon. Supported regime: epsilon <= 0.1 (for larger
    epsilon the epsilon-free lower bound can overshoot the true mixing time).
    """
    if epsilon <= 0.0:
        raise IndexOutOfRange("epsilon must be positive")
    spec = reversible_spectrum(P)
    w = spec.eigenvalues
    lam_max = max(float(w[1]), abs(float(w[-1])))
    if lam_max <= 1e-12:
        raise DegenerateSpectrum("spectral gap parameter is zero; chain mixes in one step")
    pi_min = float(spec.stationary.values.min())
    gamma = remainder_constant()
    denom = 1.0 + 1.0 / pi_min
    tau_minus = max(1, ceil(log(gamma / denom) / log(lam_max)))
    tau_plus = max(1, ceil(log(4.0 * (1.0 - cos(epsilon / 2.0)) / denom) / (2.0 * log(lam_max))))
    return MixingBounds(lam_max, pi_min, tau_minus, tau_plus, epsilon, gamma)


def random_reversible_chain(n: int, rng: np.random.Generator, alpha: Optional[float] = None):
    """Random reversible ergodic chain by the Metropolis construction.

    A strictly positive Dirichlet target and a symmetric sub-stochastic
    proposal give detailed balance by construction; every off-diagonal entry
    is positive, so the chain is ergodic.
    """
    a = np.full(n, 4.0 if alpha is None else alpha)
    target = rng.dirichlet(a)
    target = np.clip(target, 1e-6, None)
    target /= target.sum()
    W = rng.uniform(0.1, 1.0, size=(n, n))
    W = 0.5 * (W + W.T)
    np.fill_diagonal(W, 0.0)
    Q = W / (1.05 * W.sum(axis=1).max())  # symmetric, rows strictly sub-stochastic
    ratio = np.minimum(1.0, target[None, :] / target[:, None])
    Pm = Q * ratio
    np.fill_diagonal(Pm, 0.0)
    np.fill_diagonal(Pm, 1.0 - Pm.sum(axis=1))
    return Pm
