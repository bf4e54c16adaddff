import math

import numpy as np
import pytest

from conftest import chain, random_chain

from mcdist import (
    bhattacharyya_rate,
    sequence_distance,
    sequence_distance_bruteforce,
    sequence_probability,
)
from mcdist.errors import (
    DimensionMismatch,
    EnumerationTooLarge,
    IndexOutOfRange,
    UnsupportedSpectrum,
)

UNIFORM2 = [[0.5, 0.5], [0.5, 0.5]]
STICKY2 = [[0.9, 0.1], [0.1, 0.9]]


class TestSequenceProbability:
    def test_single_state_word(self):
        c = chain([0.3, 0.7], STICKY2)
        assert sequence_probability(c, [1]) == 0.7

    def test_zero_transition(self):
        c = chain([1.0, 0.0], [[0.0, 1.0], [1.0, 0.0]])
        assert sequence_probability(c, [0, 0]) == 0.0

    def test_two_step(self):
        c = chain([1.0, 0.0], UNIFORM2)
        assert sequence_probability(c, [0, 0]) == 0.5

    def test_bad_index(self):
        c = chain([1.0, 0.0], UNIFORM2)
        with pytest.raises(IndexOutOfRange):
            sequence_probability(c, [0, 2])


class TestSequenceDistance:
    def test_identical_chains(self):
        rng = np.random.default_rng(20)
        c = random_chain(rng, 3)
        for n in (1, 2, 5):
            assert sequence_distance(c, c, n) == pytest.approx(0.0, abs=1e-7)

    def test_disjoint_initials(self):
        a = chain([1.0, 0.0], UNIFORM2)
        b = chain([0.0, 1.0], UNIFORM2)
        assert sequence_distance(a, b, 3) == pytest.approx(math.pi)

    def test_worked_two_step_pair(self):
        a = chain([1.0, 0.0], UNIFORM2)
        b = chain([1.0, 0.0], STICKY2)
        # 4-word enumeration: BC = sqrt(0.45) + sqrt(0.05)
        expect = 2.0 * math.acos(math.sqrt(0.45) + math.sqrt(0.05))
        assert sequence_distance(a, b, 2) == pytest.approx(expect, abs=1e-12)
        assert sequence_distance_bruteforce(a, b, 2) == pytest.approx(expect, abs=1e-12)

    def test_state_count_mismatch(self):
        rng = np.random.default_rng(21)
        with pytest.raises(DimensionMismatch):
            sequence_distance(random_chain(rng, 2), random_chain(rng, 3), 2)

    def test_bruteforce_single_step_initial_overlap(self):
        u3 = np.full((3, 3), 1.0 / 3.0)
        a = chain([1.0, 0.0, 0.0], u3)
        b = chain([1 / 3, 1 / 3, 1 / 3], u3)
        assert sequence_distance_bruteforce(a, b, 1) == pytest.approx(
            2.0 * math.acos(math.sqrt(1 / 3)), abs=1e-12
        )

    def test_enumeration_cap(self):
        rng = np.random.default_rng(22)
        with pytest.raises(EnumerationTooLarge):
            sequence_distance_bruteforce(random_chain(rng, 4), random_chain(rng, 4), 3, cap=60)

    def test_oracle_equivalence_random(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            k = int(rng.integers(2, 5))
            n = int(rng.integers(1, 9))
            a, b = random_chain(rng, k), random_chain(rng, k)
            assert abs(sequence_distance(a, b, n) - sequence_distance_bruteforce(a, b, n)) <= 1e-9

    def test_inner_argument_monotone(self):
        rng = np.random.default_rng(24)
        for _ in range(20):
            k = int(rng.integers(2, 5))
            a, b = random_chain(rng, k), random_chain(rng, k)
            dists = [sequence_distance(a, b, n) for n in range(1, 51)]
            bcs = [math.cos(d / 2.0) for d in dists]
            assert all(bcs[i + 1] <= bcs[i] + 1e-12 for i in range(len(bcs) - 1))

    def test_metric_axioms_fixed_n(self):
        rng = np.random.default_rng(25)
        for _ in range(200):
            k = int(rng.integers(2, 4))
            a, b, c = (random_chain(rng, k) for _ in range(3))
            dab = sequence_distance(a, b, 4)
            assert dab >= 0.0
            assert dab == sequence_distance(b, a, 4)
            assert dab <= sequence_distance(a, c, 4) + sequence_distance(c, b, 4) + 1e-12

    def test_normalized_distance_vanishes(self):
        rng = np.random.default_rng(26)
        for _ in range(5):
            a, b = random_chain(rng, 3), random_chain(rng, 3)
            n = 10_000
            assert sequence_distance(a, b, n) / n <= math.pi / n


class TestBhattacharyyaRate:
    def test_identical_ergodic_chains(self):
        rng = np.random.default_rng(27)
        c = random_chain(rng, 3)
        res = bhattacharyya_rate(c, c)
        assert res.case.tag == "type2"
        assert res.value == pytest.approx(0.0, abs=1e-7)

    def test_disjoint_matrices_give_pi(self):
        a = chain([0.5, 0.5], [[0.0, 1.0], [1.0, 0.0]])
        b = chain([0.5, 0.5], [[1.0, 0.0], [0.0, 1.0]])
        res = bhattacharyya_rate(a, b)
        assert res.case.tag == "subunit"
        assert res.value == math.pi

    def test_shared_matrix_different_initials(self):
        P = [[0.7, 0.3], [0.3, 0.7]]
        a = chain([1.0, 0.0], P)
        b = chain([0.5, 0.5], P)
        res = bhattacharyya_rate(a, b)
        assert res.case.tag == "type2"
        assert res.value == pytest.approx(2.0 * math.acos(math.sqrt(0.5)), abs=1e-9)

    def test_unsupported_spectrum_raises(self):
        P = [[0.0, 1.0], [1.0, 0.0]]
        with pytest.raises(UnsupportedSpectrum):
            bhattacharyya_rate(chain([0.5, 0.5], P), chain([0.5, 0.5], P))

    def test_rate_matches_long_run(self):
        rng = np.random.default_rng(28)
        for _ in range(25):
            k = int(rng.integers(2, 5))
            a, b = random_chain(rng, k), random_chain(rng, k)
            res = bhattacharyya_rate(a, b)
            assert res.case.tag in ("type2", "subunit")
            n = 64
            while n <= 2 ** 20:
                if abs(res.value - sequence_distance(a, b, n)) <= 1e-6:
                    break
                n *= 2
            else:
                pytest.fail("finite-n distance never reached the closed-form rate")

    def test_type1_block_diagonal_rate(self):
        # Same block-diagonal matrix: R has two unit eigenvalues, not primitive.
        P = [
            [0.7, 0.3, 0.0, 0.0],
            [0.3, 0.7, 0.0, 0.0],
            [0.0, 0.0, 0.5, 0.5],
            [0.0, 0.0, 0.5, 0.5],
        ]
        a = chain([0.5, 0.5, 0.0, 0.0], P)
        b = chain([0.25, 0.25, 0.25, 0.25], P)
        res = bhattacharyya_rate(a, b)
        assert res.case.tag == "type1"
        assert res.value == pytest.approx(sequence_distance(a, b, 4096), abs=1e-6)
