import itertools
import math

import numpy as np
import pytest

from conftest import random_stochastic

from mcdist import (
    SimulationConfig,
    adjusted_rand_index,
    adjusted_rand_index_trace,
    cluster_k_medoids,
    contingency,
    interpolate_alpha,
    l1_matrix_distance,
    l2_matrix_distance,
    pairwise_distance_matrix,
    run_simulation,
    sample_dirichlet,
    sample_stochastic_matrix,
    stochastic_matrix_distance,
    sym_kl_rate,
)
from mcdist.errors import (
    DegenerateInput,
    DimensionMismatch,
    InfiniteDistance,
    LengthMismatch,
    NonPositiveAlpha,
    TooFewPoints,
    ValidationError,
)


class TestSampling:
    def test_dirichlet_on_simplex(self):
        rng = np.random.default_rng(50)
        for _ in range(200):
            v = sample_dirichlet([0.5, 2.0, 7.0], rng).values
            assert v.min() >= 0.0
            assert v.sum() == pytest.approx(1.0, abs=1e-12)

    def test_dirichlet_moments(self):
        # mean alpha_i / alpha_0, var alpha_i (alpha_0 - alpha_i) / (alpha_0^2 (alpha_0 + 1))
        rng = np.random.default_rng(51)
        alpha = np.array([2.0, 5.0, 3.0])
        a0 = alpha.sum()
        draws = np.stack([sample_dirichlet(alpha, rng).values for _ in range(20_000)])
        mean = alpha / a0
        var = alpha * (a0 - alpha) / (a0 * a0 * (a0 + 1.0))
        se_mean = np.sqrt(var / draws.shape[0])
        assert np.all(np.abs(draws.mean(axis=0) - mean) <= 4.0 * se_mean)
        # fourth-moment bound on the variance estimate, 4 sigma
        se_var = np.sqrt(2.0 / draws.shape[0]) * var
        assert np.all(np.abs(draws.var(axis=0) - var) <= 6.0 * se_var)

    def test_rejects_bad_alpha(self):
        rng = np.random.default_rng(52)
        with pytest.raises(NonPositiveAlpha):
            sample_dirichlet([1.0, 0.0], rng)
        with pytest.raises(DimensionMismatch):
            sample_dirichlet([[1.0, 2.0]], rng)

    def test_matrix_rows_stochastic(self):
        rng = np.random.default_rng(53)
        M = sample_stochastic_matrix([3.0, 1.0, 1.0, 2.0], rng)
        assert M.rows.shape == (4, 4)
        np.testing.assert_allclose(M.rows.sum(axis=1), 1.0, atol=1e-12)
        assert M.rows.min() >= 0.0

    def test_interpolation(self):
        a = np.array([8.0, 2.0, 2.0])
        b = np.array([8.0, 8.0, 8.0])
        np.testing.assert_array_equal(interpolate_alpha(a, b, 0.0), a)
        np.testing.assert_array_equal(interpolate_alpha(a, b, 1.0), b)
        np.testing.assert_allclose(interpolate_alpha(a, b, 0.5), [8.0, 5.0, 5.0], atol=1e-15)
        with pytest.raises(DimensionMismatch):
            interpolate_alpha(a, [1.0, 1.0], 0.5)


class TestPairwiseDistanceMatrix:
    def _mats(self, seed, m=6, n=3):
        rng = np.random.default_rng(seed)
        return np.stack([random_stochastic(rng, n, alpha=2.0).rows for _ in range(m)])

    def test_matches_single_pair_functions(self):
        mats = self._mats(54)
        oracles = {
            "smd": stochastic_matrix_distance,
            "skl": sym_kl_rate,
            "l1": l1_matrix_distance,
            "l2": l2_matrix_distance,
        }
        for metric, fn in oracles.items():
            D = pairwise_distance_matrix(mats, metric).entries
            assert D.shape == (6, 6)
            np.testing.assert_array_equal(D, D.T)
            np.testing.assert_array_equal(np.diag(D), 0.0)
            for a in range(6):
                for b in range(a + 1, 6):
                    assert D[a, b] == pytest.approx(fn(mats[a], mats[b]), abs=1e-8)

    def test_skl_infinite_without_smoothing(self):
        mats = np.stack([
            np.array([[0.7, 0.3], [0.3, 0.7]]),
            np.array([[0.0, 1.0], [0.5, 0.5]]),
        ])
        with pytest.raises(InfiniteDistance):
            pairwise_distance_matrix(mats, "skl")
        D = pairwise_distance_matrix(mats, "skl", smoothing=1e-4).entries
        assert np.all(np.isfinite(D))
        assert D[0, 1] > 0.0

    def test_smoothing_ignored_elsewhere(self):
        mats = self._mats(55, m=3)
        for metric in ("smd", "l1", "l2"):
            a = pairwise_distance_matrix(mats, metric).entries
            b = pairwise_distance_matrix(mats, metric, smoothing=1e-3).entries
            np.testing.assert_array_equal(a, b)

    def test_rejects_bad_input(self):
        mats = self._mats(56, m=2)
        with pytest.raises(ValidationError):
            pairwise_distance_matrix(mats, "cosine")
        with pytest.raises(DegenerateInput):
            pairwise_distance_matrix(mats[:1], "smd")


def _exhaustive_medoid_cost(E, K):
    m = E.shape[0]
    best = math.inf
    for combo in itertools.combinations(range(m), K):
        cost = E[:, combo].min(axis=1).sum()
        best = min(best, cost)
    return best


class TestKMedoids:
    def _line_distance(self, points):
        pts = np.asarray(points, dtype=float)
        return np.abs(pts[:, None] - pts[None, :])

    def test_recovers_separated_groups(self):
        points = [0.0, 0.1, 0.2, 5.0, 5.1, 5.2, 10.0, 10.1, 10.2]
        E = self._line_distance(points)
        labels = cluster_k_medoids(E, 3, np.random.default_rng(57))
        np.testing.assert_array_equal(labels, [0, 0, 0, 1, 1, 1, 2, 2, 2])

    def test_cost_matches_exhaustive_search(self):
        rng = np.random.default_rng(58)
        for _ in range(20):
            m = int(rng.integers(5, 10))
            K = int(rng.integers(2, 4))
            pts = rng.random((m, 2))
            E = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
            labels = cluster_k_medoids(E, K, np.random.default_rng(int(rng.integers(10_000))))
            # reconstruct achieved cost from the labeling's best medoids
            cost = 0.0
            for k in range(K):
                members = np.flatnonzero(labels == k)
                cost += E[np.ix_(members, members)].sum(axis=0).min()
            assert cost == pytest.approx(_exhaustive_medoid_cost(E, K), abs=1e-9)

    def test_deterministic_and_canonical(self):
        E = self._line_distance([0.0, 1.0, 10.0, 11.0])
        a = cluster_k_medoids(E, 2, np.random.default_rng(59))
        b = cluster_k_medoids(E, 2, np.random.default_rng(59))
        np.testing.assert_array_equal(a, b)
        assert a[0] == 0  # first point always opens cluster 0

    def test_tie_break_on_symmetric_input(self):
        # all points equidistant: every 2-medoid choice has equal cost, so the
        # lexicographically least canonical labeling must win
        E = np.ones((4, 4)) - np.eye(4)
        labels = cluster_k_medoids(E, 2, np.random.default_rng(60))
        np.testing.assert_array_equal(labels, [0, 0, 0, 1])

    def test_rejects_bad_k(self):
        E = self._line_distance([0.0, 1.0, 2.0])
        with pytest.raises(DegenerateInput):
            cluster_k_medoids(E, 4, np.random.default_rng(61))
        with pytest.raises(DegenerateInput):
            cluster_k_medoids(E, 0, np.random.default_rng(61))


class TestAdjustedRandIndex:
    def test_contingency_counts(self):
        tab = contingency([0, 0, 1, 1, 2], [0, 1, 1, 1, 0])
        np.testing.assert_array_equal(tab.counts, [[1, 1], [0, 2], [1, 0]])
        np.testing.assert_array_equal(tab.row_sums, [2, 2, 1])
        np.testing.assert_array_equal(tab.col_sums, [2, 3])
        assert tab.total == 5

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            contingency([0, 1], [0, 1, 0])

    def test_perfect_agreement(self):
        tab = contingency([0, 0, 1, 1], [1, 1, 0, 0])
        assert adjusted_rand_index(tab) == 1.0
        assert adjusted_rand_index_trace(tab) == 1.0

    def test_crossing_example(self):
        # two 2-cluster labelings crossing on 4 points
        tab = contingency([0, 0, 1, 1], [0, 1, 0, 1])
        assert adjusted_rand_index(tab) == pytest.approx(-0.5, abs=0)
        assert adjusted_rand_index_trace(tab) == pytest.approx(1.0 / 7.0, abs=1e-15)

    def test_degenerate_single_cluster(self):
        tab = contingency([0, 0, 0], [5, 5, 5])
        assert adjusted_rand_index(tab) == 1.0
        tab2 = contingency([0, 0, 0], [0, 1, 2])
        assert adjusted_rand_index(tab2) == 0.0

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            adjusted_rand_index(contingency([0], [0]))

    def test_null_distribution_centered(self):
        # random permutations of a fixed labeling have mean ARI approx 0
        rng = np.random.default_rng(62)
        base = np.repeat(np.arange(4), 10)
        vals = []
        for _ in range(2000):
            vals.append(adjusted_rand_index(contingency(base, rng.permutation(base))))
        assert abs(np.mean(vals)) <= 0.02

    def test_invariant_to_label_names(self):
        a = [0, 0, 1, 2, 2, 1]
        b = [3, 3, 7, 9, 9, 9]
        ren = {0: 10, 1: 4, 2: 0}
        tab1 = contingency(a, b)
        tab2 = contingency([ren[x] for x in a], b)
        assert adjusted_rand_index(tab1) == adjusted_rand_index(tab2)


class TestSimulation:
    def _tiny(self, **kw):
        base = dict(
            alphas=((6.0, 6.0), (6.0, 1.0)),
            steps=2,
            repetitions=3,
            cluster_size=4,
            metrics=("smd", "l1"),
            seed=7,
        )
        base.update(kw)
        return SimulationConfig(**base)

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            self._tiny(alphas=((1.0, 1.0),))
        with pytest.raises(DimensionMismatch):
            self._tiny(alphas=((1.0, 1.0), (1.0, 1.0, 1.0)))
        with pytest.raises(NonPositiveAlpha):
            self._tiny(alphas=((1.0, -1.0), (1.0, 1.0)))
        with pytest.raises(TooFewPoints):
            self._tiny(cluster_size=1)
        with pytest.raises(ValidationError):
            self._tiny(metrics=("smd", "cosine"))

    def test_row_schema(self):
        cfg = self._tiny()
        res = run_simulation(cfg)
        assert len(res.rows) == (cfg.steps + 1) * len(cfg.metrics)
        keys = [(r.t, r.metric) for r in res.rows]
        assert keys == sorted(keys)
        for r in res.rows:
            assert r.reps == cfg.repetitions
            assert -1.0 <= r.mean_ari <= 1.0
            assert r.std_ari >= 0.0
        assert res.cell(0.5, "l1").t == 0.5
        with pytest.raises(KeyError):
            res.cell(0.25, "l1")

    def test_deterministic(self):
        a = run_simulation(self._tiny())
        b = run_simulation(self._tiny())
        assert a.rows == b.rows

    def test_sample_collection(self):
        cfg = self._tiny()
        res, samples = run_simulation(cfg, collect_samples=True)
        assert len(samples) == (cfg.steps + 1) * len(cfg.alphas) * cfg.cluster_size
        t0, k0, rows0 = samples[0]
        assert t0 == 0.0 and k0 == 0
        np.testing.assert_allclose(rows0.sum(axis=1), 1.0, atol=1e-12)
        assert res.rows == run_simulation(cfg).rows

    def test_recovery_degrades_toward_reference(self):
        cfg = SimulationConfig(
            alphas=((9.0, 9.0, 9.0), (9.0, 1.5, 1.5), (1.5, 9.0, 1.5)),
            steps=1,
            repetitions=6,
            cluster_size=8,
            metrics=("smd",),
            seed=11,
        )
        res = run_simulation(cfg)
        assert res.cell(0.0, "smd").mean_ari > 0.5
        assert res.cell(1.0, "smd").mean_ari < res.cell(0.0, "smd").mean_ari
