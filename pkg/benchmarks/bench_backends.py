"""Compare the numba kernels against the pure-numpy fallbacks.

Runs each hot kernel on the same inputs under both backends and prints wall
times plus the maximum absolute disagreement. Invoke directly:

    python3 benchmarks/bench_backends.py [--points 80] [--states 3] [--repeat 5]

The backend is fixed at import, so this script reloads mcdist.kernels with
MCDIST_NO_NUMBA toggled between measurements.
"""

import argparse
import importlib
import os
import time

import numpy as np

import mcdist.kernels


def _reload(no_numba):
    os.environ["MCDIST_NO_NUMBA"] = "1" if no_numba else "0"
    return importlib.reload(mcdist.kernels)


def _sample_matrices(rng, m, n):
    g = rng.standard_gamma(1.0, size=(m, n, n))
    return g / g.sum(axis=2, keepdims=True)


def _stationaries(mats):
    m, n, _ = mats.shape
    A = mats.transpose(0, 2, 1) - np.eye(n)[None, :, :]
    A[:, -1, :] = 1.0
    b = np.zeros((m, n, 1))
    b[:, -1, 0] = 1.0
    pis = np.linalg.solve(A, b)[:, :, 0]
    return pis / pis.sum(axis=1, keepdims=True)


def _time(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=80)
    ap.add_argument("--states", type=int, default=3)
    ap.add_argument("--clusters", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    mats = _sample_matrices(rng, args.points, args.states)
    pis = _stationaries(mats)
    init = np.sort(rng.choice(args.points, size=args.clusters, replace=False)).astype(np.int64)

    cases = [
        ("pairwise_smd", lambda k: k.pairwise_smd(mats)),
        ("pairwise_l1", lambda k: k.pairwise_l1(mats)),
        ("pairwise_l2", lambda k: k.pairwise_l2(mats)),
        ("pairwise_sym_kl", lambda k: k.pairwise_sym_kl(mats, pis)),
    ]

    numba_mod = _reload(no_numba=False)
    if not numba_mod.USE_NUMBA:
        print("numba unavailable; both columns use the numpy fallback")
    print(f"{'kernel':<18} {'numba (ms)':>12} {'numpy (ms)':>12} {'speedup':>9} {'max |diff|':>12}")

    D_ref = None
    for name, call in cases:
        numba_mod = _reload(no_numba=False)
        call(numba_mod)  # warm the jit cache outside the timed region
        t_nb, r_nb = _time(lambda: call(numba_mod), args.repeat)
        numpy_mod = _reload(no_numba=True)
        t_np, r_np = _time(lambda: call(numpy_mod), args.repeat)
        diff = float(np.nanmax(np.abs(r_nb - r_np)))
        print(f"{name:<18} {t_nb * 1e3:>12.3f} {t_np * 1e3:>12.3f} {t_np / t_nb:>8.1f}x {diff:>12.3e}")
        if name == "pairwise_smd":
            D_ref = r_nb

    numba_mod = _reload(no_numba=False)
    numba_mod.pam_descent(D_ref, init)
    t_nb, (m_nb, c_nb) = _time(lambda: numba_mod.pam_descent(D_ref, init.copy()), args.repeat)
    numpy_mod = _reload(no_numba=True)
    t_np, (m_np, c_np) = _time(lambda: numpy_mod.pam_descent(D_ref, init.copy()), args.repeat)
    agree = "yes" if np.array_equal(np.sort(m_nb), np.sort(m_np)) else "NO"
    print(f"{'pam_descent':<18} {t_nb * 1e3:>12.3f} {t_np * 1e3:>12.3f} {t_np / t_nb:>8.1f}x "
          f"cost diff {abs(c_nb - c_np):.3e} medoids agree: {agree}")

    os.environ.pop("MCDIST_NO_NUMBA", None)
    importlib.reload(mcdist.kernels)


if __name__ == "__main__":
    main()
