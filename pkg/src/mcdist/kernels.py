"""Hot numeric kernels: pairwise distance matrices and k-medoids descent.

Every kernel has two implementations: tight loops compiled with numba's
``@njit``, and a vectorized pure-numpy fallback. The backend is chosen once at
import: set ``MCDIST_NO_NUMBA=1`` to force the numpy path (numba is also
skipped automatically when it is not importable). Both paths are sequential
and deterministic; see ``benchmarks/bench_backends.py`` for a comparison.
"""

from __future__ import annotations

import math
import os

import numpy as np

_SWAP_TOL = 1e-12  # a swap must beat the incumbent cost by this much

_disable = os.environ.get("MCDIST_NO_NUMBA", "").strip() not in ("", "0")
try:
    import numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and not _disable

__all__ = [
    "USE_NUMBA",
    "NUMBA_AVAILABLE",
    "pairwise_smd",
    "pairwise_l1",
    "pairwise_l2",
    "pairwise_sym_kl",
    "pam_descent",
]


def _maybe_njit(fn):
    if USE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn


# ---------------------------------------------------------------------------
# pairwise distances over a stack of stochastic matrices, shape (m, n, n)
# ---------------------------------------------------------------------------

@_maybe_njit
def _pairwise_smd_loops(B, out):
    # B holds entrywise square roots of the matrices.
    m, n, _ = B.shape
    for a in range(m):
        for b in range(a + 1, m):
            s = 0.0
            for i in range(n):
                h2 = 0.0
                for j in range(n):
                    diff = B[a, i, j] - B[b, i, j]
                    h2 += diff * diff
                bc = 1.0 - 0.5 * h2
                if bc > 1.0:
                    bc = 1.0
                elif bc < 0.0:
                    bc = 0.0
                ang = math.acos(bc)
                s += ang * ang
            d = 2.0 * math.sqrt(s)
            out[a, b] = d
            out[b, a] = d


def pairwise_smd(mats: np.ndarray) -> np.ndarray:
    """Stochastic-matrix distance for every unordered pair."""
    m = mats.shape[0]
    out = np.zeros((m, m))
    if USE_NUMBA:
        _pairwise_smd_loops(np.sqrt(mats), out)
        return out
    B = np.sqrt(mats)
    h2 = ((B[:, None, :, :] - B[None, :, :, :]) ** 2).sum(axis=3)
    bc = np.clip(1.0 - 0.5 * h2, 0.0, 1.0)
    out = 2.0 * np.sqrt((np.arccos(bc) ** 2).sum(axis=2))
    np.fill_diagonal(out, 0.0)
    return 0.5 * (out + out.T)


@_maybe_njit
def _pairwise_lp_loops(M, out, squared):
    m, n, _ = M.shape
    for a in range(m):
        for b in range(a + 1, m):
            s = 0.0
            for i in range(n):
                for j in range(n):
                    diff = abs(M[a, i, j] - M[b, i, j])
                    s += diff * diff if squared else diff
            d = math.sqrt(s) if squared else s
            out[a, b] = d
            out[b, a] = d


def pairwise_l1(mats: np.ndarray) -> np.ndarray:
    """Entrywise L1 distance for every unordered pair."""
    m = mats.shape[0]
    out = np.zeros((m, m))
    if USE_NUMBA:
        _pairwise_lp_loops(mats, out, False)
        return out
    flat = mats.reshape(m, -1)
    return np.abs(flat[:, None, :] - flat[None, :, :]).sum(axis=2)


def pairwise_l2(mats: np.ndarray) -> np.ndarray:
    """Entrywise (Frobenius) L2 distance for every unordered pair."""
    m = mats.shape[0]
    out = np.zeros((m, m))
    if USE_NUMBA:
        _pairwise_lp_loops(mats, out, True)
        return out
    flat = mats.reshape(m, -1)
    d2 = ((flat[:, None, :] - flat[None, :, :]) ** 2).sum(axis=2)
    return np.sqrt(np.clip(d2, 0.0, None))


@_maybe_njit
def _kl_rate_loops(M, PI, a, b):
    n = M.shape[1]
    s = 0.0
    for i in range(n):
        row = 0.0
        for j in range(n):
            p = M[a, i, j]
            q = M[b, i, j]
            if p > 0.0:
                if q <= 0.0:
                    return np.inf
                row += p * math.log(p / q)
        s += PI[a, i] * row
    return s


@_maybe_njit
def _pairwise_skl_loops(M, PI, out):
    m = M.shape[0]
    for a in range(m):
        for b in range(a + 1, m):
            d = _kl_rate_loops(M, PI, a, b) + _kl_rate_loops(M, PI, b, a)
            out[a, b] = d
            out[b, a] = d


def _kl_rate_numpy(M, PI, a, b):
    p = M[a]
    q = M[b]
    if np.any((p > 0.0) & (q <= 0.0)):
        return np.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        term = np.where(p > 0.0, p * np.log(np.where(p > 0.0, p, 1.0) / np.where(q > 0.0, q, 1.0)), 0.0)
    return float(PI[a] @ term.sum(axis=1))


def pairwise_sym_kl(mats: np.ndarray, stationaries: np.ndarray) -> np.ndarray:
    """Stationary-weighted symmetric KL rate for every unordered pair.

    An absolute-continuity failure in either direction yields +inf.
    """
    m = mats.shape[0]
    out = np.zeros((m, m))
    if USE_NUMBA:
        _pairwise_skl_loops(mats, stationaries, out)
        return out
    for a in range(m):
        for b in range(a + 1, m):
            d = _kl_rate_numpy(mats, stationaries, a, b) + _kl_rate_numpy(mats, stationaries, b, a)
            out[a, b] = d
            out[b, a] = d
    return out


# ---------------------------------------------------------------------------
# PAM k-medoids swap descent
# ---------------------------------------------------------------------------

@_maybe_njit
def _pam_descent_loops(D, medoids_in):
    m = D.shape[0]
    K = medoids_in.shape[0]
    medoids = medoids_in.copy()
    d1 = np.empty(m)
    d2 = np.empty(m)
    n1 = np.empty(m, dtype=np.int64)
    is_medoid = np.zeros(m, dtype=np.bool_)
    for _ in range(m * m):  # each improving swap strictly lowers the cost
        for p in range(m):
            b1 = np.inf
            b2 = np.inf
            bi = -1
            for a in range(K):
                dd = D[p, medoids[a]]
                if dd < b1:
                    b2 = b1
                    b1 = dd
                    bi = a
                elif dd < b2:
                    b2 = dd
            d1[p] = b1
            d2[p] = b2
            n1[p] = bi
        for p in range(m):
            is_medoid[p] = False
        for a in range(K):
            is_medoid[medoids[a]] = True
        best_delta = -_SWAP_TOL
        best_a = -1
        best_h = -1
        for h in range(m):
            if is_medoid[h]:
                continue
            for a in range(K):
                delta = 0.0
                for p in range(m):
                    if n1[p] == a:
                        alt = D[p, h]
                        if d2[p] < alt:
                            alt = d2[p]
                        delta += alt - d1[p]
                    else:
                        diff = D[p, h] - d1[p]
                        if diff < 0.0:
                            delta += diff
                if delta < best_delta:
                    best_delta = delta
                    best_a = a
                    best_h = h
        if best_a < 0:
            break
        medoids[best_a] = best_h
    cost = 0.0
    for p in range(m):
        b1 = np.inf
        for a in range(K):
            dd = D[p, medoids[a]]
            if dd < b1:
                b1 = dd
        cost += b1
    return medoids, cost


def _pam_descent_numpy(D, medoids_in):
    m = D.shape[0]
    K = medoids_in.shape[0]
    medoids = medoids_in.copy()
    for _ in range(m * m):
        Dm = D[:, medoids]
        n1 = Dm.argmin(axis=1)
        d1 = Dm[np.arange(m), n1]
        if K > 1:
            part = np.partition(Dm, 1, axis=1)
            d2 = part[:, 1]
        else:
            d2 = np.full(m, np.inf)
        # deltas[h, a]: row-major argmin matches the loop backend's tie order
        deltas = np.empty((m, K))
        loss = np.minimum(D - d1[:, None], 0.0)  # (p, h) gain for p not served by a
        for a in range(K):
            mask = n1 == a
            served = np.minimum(D[mask], d2[mask, None]) - d1[mask, None]
            deltas[:, a] = served.sum(axis=0) + loss[~mask].sum(axis=0)
        deltas[medoids, :] = np.inf
        flat = deltas.argmin()
        h, a = divmod(int(flat), K)
        if deltas[h, a] >= -_SWAP_TOL:
            break
        medoids[a] = h
    d1 = D[:, medoids].min(axis=1)
    return medoids, float(d1.sum())


def pam_descent(D: np.ndarray, medoids: np.ndarray):
    """Greedy best-swap PAM descent from an initial medoid set.

    Returns the final medoid indices and the total within-cluster cost. The
    cost never increases and the loop is capped at m^2 swaps.
    """
    medoids = np.asarray(medoids, dtype=np.int64)
    if USE_NUMBA:
        return _pam_descent_loops(D, medoids)
    return _pam_descent_numpy(D, medoids)
