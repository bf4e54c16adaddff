"""Bhattacharyya-angle distances for Markov chains and stochastic matrices.

Sequence-space distances with a closed-form infinite-run limit, mixing times
with analytic bounds, a product-metric distance on stochastic matrices, and a
Dirichlet-cluster benchmark scored by the adjusted Rand index.
"""

from .cluster import (
    ContingencyTable,
    DistanceMatrix,
    ResultRow,
    SimulationConfig,
    SimulationResult,
    adjusted_rand_index,
    adjusted_rand_index_trace,
    cluster_k_medoids,
    contingency,
    interpolate_alpha,
    pairwise_distance_matrix,
    run_simulation,
    sample_dirichlet,
    sample_stochastic_matrix,
)
from .core import (
    MarkovChain,
    NonNegativeMatrix,
    ProbabilityVector,
    RateCase,
    SpectralDecomposition,
    StochasticMatrix,
    bhattacharyya_angle,
    bhattacharyya_coefficient,
    classify_rate_case,
    eigen_decompose,
    hadamard_geometric_mean_matrix,
    hadamard_geometric_mean_vector,
    is_aperiodic,
    is_ergodic,
    is_irreducible,
    is_primitive,
    is_reversible,
    make_probability_vector,
    make_stochastic_matrix,
    period,
    spectral_radius,
    stationary_distribution,
)
from .matdist import (
    METRICS,
    ergodic_distance,
    l1_matrix_distance,
    l2_matrix_distance,
    stochastic_matrix_distance,
    sym_kl_rate,
)
from .mixing import (
    MixingBounds,
    ReversibleSpectrum,
    distribution_at,
    mixing_bounds,
    mixing_time_exact,
    random_reversible_chain,
    reversible_spectrum,
    transition_power_spectral,
)
from .seqdist import (
    RateResult,
    bhattacharyya_rate,
    sequence_distance,
    sequence_distance_bruteforce,
    sequence_probability,
)

__version__ = "0.1.0"
