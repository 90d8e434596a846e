"""Exact, desk-scale experiments on sparse representations of squares."""

from .approx import (
    ApproxInstance,
    InstanceConstants,
    LacunaryReport,
    LacunaryState,
    Representation,
    b_sequence,
    instance_constants,
    lacunary_state,
    lacunary_verify,
    representable_n,
    search_representations,
)
from .arith import (
    Factorization,
    factorize,
    is_perfect_square,
    is_prime,
    jacobi,
    largest_prime_factor,
    mul_order,
    primes_in_range,
    square_root,
    two_adic_valuation,
)
from .charsums import (
    CharSumSpec,
    PhaseSum,
    SieveStatistics,
    crt_split,
    crt_split_orders,
    incomplete_sum,
    korobov_sum,
    product_sum,
    product_sum_check,
    quad_diag_sum,
    s_ell,
    sieve_statistics,
    t_m_count,
    twisted_diag_sum,
)
from .errors import *  # noqa: F403
from .forms import (
    GAMMA_LIMIT,
    SparseForm,
    SquareHit,
    count_congruence_solutions,
    count_representable_n,
    count_sparse_squares,
    count_square_tuples,
    derive_box_cap,
    gamma_m,
    lower_bound_family,
    sparse_squares,
)
from .harness import ExperimentConfig, build_config, growth_table, run
from .sieve import SievePrime, SieveSet, build_sieve_set, gcd_sum, omega_sum, omega_z

__version__ = "0.1.0"
