import numpy as np

from mcdist import MarkovChain, ProbabilityVector, StochasticMatrix


def random_stochastic(rng: np.random.Generator, n: int, alpha: float = 1.0) -> StochasticMatrix:
    """Strictly positive random stochastic matrix (Dirichlet rows)."""
    return StochasticMatrix(rng.dirichlet(np.full(n, alpha), size=n))


def random_simplex(rng: np.random.Generator, n: int, alpha: float = 1.0) -> ProbabilityVector:
    return ProbabilityVector(rng.dirichlet(np.full(n, alpha)))


def random_chain(rng: np.random.Generator, n: int, alpha: float = 1.0) -> MarkovChain:
    return MarkovChain(random_simplex(rng, n, alpha), random_stochastic(rng, n, alpha))


def chain(initial, rows) -> MarkovChain:
    return MarkovChain(
        ProbabilityVector(np.asarray(initial, dtype=float)),
        StochasticMatrix(np.asarray(rows, dtype=float)),
    )
