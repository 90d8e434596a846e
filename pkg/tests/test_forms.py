import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from sparsity_lab.errors import DomainError, WorkloadExceeded
from sparsity_lab.forms import (
    GAMMA_LIMIT,
    SparseForm,
    box_cap_derivation,
    count_congruence_solutions,
    count_representable_n,
    count_sparse_squares,
    count_square_tuples,
    derive_box_cap,
    eval_form,
    gamma_m,
    lower_bound_family,
    nonzero_digits,
    pattern_multiplicities,
    residue_histogram,
    sparse_squares,
)

# Goldens below were produced by tests/oracles.py before being frozen here;
# test_goldens_reproduced_by_oracle re-derives them on every run.
GOLDEN_M = {((1, 1), 2, 10): 13, ((1,), 2, 10): 6, ((-1,), 2, 5): 0}
GOLDEN_WITNESSES = {((1, 1), 2, 20): [2, 3, 4, 6, 8, 12, 16], ((1, 1), 2, 1): [], ((9,), 4, 12): [3, 6, 12]}
GOLDEN_SPARSE = {(2, 2, 4): 3, (10, 1, 3): 6, (2, 1, 5): 3}


def test_goldens_reproduced_by_oracle():
    for (c, g, K), M in GOLDEN_M.items():
        assert len(oracles.square_tuples(c, g, K)) == M
    for (c, g, N), wit in GOLDEN_WITNESSES.items():
        assert oracles.representable(c, g, N, 12) == wit
    for (g, m, K), n in GOLDEN_SPARSE.items():
        assert len(oracles.sparse_squares(g, m, K)) == n


def test_form_validation():
    with pytest.raises(DomainError):
        SparseForm(1, (1,))
    with pytest.raises(DomainError):
        SparseForm(2, ())
    with pytest.raises(DomainError):
        SparseForm(2, (1, 0))


@pytest.mark.parametrize("c, g, k, v", [((1, 1), 2, (0, 3), 9), ((1, 1), 2, (3, 3), 16), ((2, -1), 3, (2, 0), 17)])
def test_eval_form(c, g, k, v):
    assert eval_form(SparseForm(g, c), k) == v
    assert SparseForm(g, c)(k) == v


def test_eval_form_arity():
    with pytest.raises(DomainError):
        eval_form(SparseForm(2, (1, 1)), (1,))


@pytest.mark.parametrize("key", list(GOLDEN_M))
@pytest.mark.parametrize("method", ["brute", "mitm"])
def test_count_square_tuples_golden(key, method):
    c, g, K = key
    M, hits = count_square_tuples(SparseForm(g, c), K, method=method)
    assert M == GOLDEN_M[key]
    assert [(h.k, h.value, h.root) for h in hits] == oracles.square_tuples(c, g, K)


def test_nine_times_power_family():
    form = SparseForm(2, (1, 1))
    _, hits = count_square_tuples(form, 12)
    keys = {h.k for h in hits}
    for k1 in range(0, 10, 2):
        assert (k1, k1 + 3) in keys
        assert form((k1, k1 + 3)) == 9 * 2**k1


def test_zero_hits_flagged():
    form = SparseForm(2, (1, -1))
    M, hits = count_square_tuples(form, 3, include_zero=True)
    zeros = [h for h in hits if h.is_zero]
    assert len(zeros) == 4
    M0, _ = count_square_tuples(form, 3)
    assert M0 == M - 4


@given(
    st.integers(min_value=2, max_value=5),
    st.lists(st.integers(min_value=-3, max_value=3).filter(bool), min_size=1, max_size=3),
    st.integers(min_value=0, max_value=6),
)
@settings(max_examples=60, deadline=None)
def test_mitm_equals_brute(g, c, K):
    form = SparseForm(g, tuple(c))
    a = count_square_tuples(form, K, method="brute", include_zero=True)
    b = count_square_tuples(form, K, method="mitm", include_zero=True)
    assert a == b
    assert [(h.k, h.value, h.root) for h in a[1]] == oracles.square_tuples(c, g, K, include_zero=True)


def test_budget_enforced():
    with pytest.raises(WorkloadExceeded):
        count_square_tuples(SparseForm(2, (1, 1, 1)), 50, budget_limit=1000)


@pytest.mark.parametrize("key", list(GOLDEN_WITNESSES))
def test_count_representable_golden(key):
    c, g, N = key
    count, wit = count_representable_n(SparseForm(g, c), N)
    assert wit == GOLDEN_WITNESSES[key]
    assert count == len(wit)


def test_count_representable_oracle_sweep():
    cases = [
        (2, (1, 1)), (2, (1, 2)), (2, (1, 1, 1)), (2, (1, -1)), (3, (1, 1)), (3, (1, 2, 1)),
        (10, (1,)), (10, (1, 1)), (10, (4, 5)), (3, (2, 1, 1)),
    ]
    for g, c in cases:
        for N in (2, 50, 500):
            form = SparseForm(g, c)
            K = derive_box_cap(form, N)
            _, wit = count_representable_n(form, N, K)
            assert wit == oracles.representable(c, g, N, K), (g, c, N)


@pytest.mark.parametrize("c, g, N, K", [((1, 1), 2, 20, 10), ((1,), 10, 10, 3)])
def test_derive_box_cap(c, g, N, K):
    form = SparseForm(g, c)
    assert derive_box_cap(form, N) == K
    assert f"K={K}" in box_cap_derivation(form, N)


def test_derive_box_cap_small_n():
    K = derive_box_cap(SparseForm(2, (1, 1)), 2)
    assert 2 <= K <= 4
    assert "cancel" in box_cap_derivation(SparseForm(2, (1, -1)), 10)


def test_residue_histogram_matches_direct():
    for c, g, K, q in [(1, 2, 20, 7), (3, 2, 9, 12), (5, 10, 13, 8), (1, 3, 0, 5), (2, 6, 11, 9)]:
        direct = {}
        for k in range(K + 1):
            r = c * g**k % q
            direct[r] = direct.get(r, 0) + 1
        assert dict(residue_histogram(c, g, K, q)) == direct


def test_congruence_counts():
    # residues {1,2,4} and {6,5,3,6}: oracle gives 6 pairs
    assert count_congruence_solutions(SparseForm(2, (1, 6)), 3, 7) == oracles.congruence_count((1, 6), 2, 3, 7) == 6
    for c, g, K, q in itertools.product([(1, 1), (1, -2, 3), (2,)], [2, 3], [0, 4, 6], [5, 9, 23]):
        assert count_congruence_solutions(SparseForm(g, c), K, q) == oracles.congruence_count(c, g, K, q)


@pytest.mark.parametrize("key", list(GOLDEN_SPARSE))
def test_count_sparse_squares_golden(key):
    assert count_sparse_squares(*key) == GOLDEN_SPARSE[key]


def test_sparse_squares_values():
    assert sparse_squares(2, 2, 4) == [1, 4, 9]
    assert sparse_squares(10, 1, 3) == [1, 4, 9, 100, 400, 900]
    assert sparse_squares(2, 1, 5) == [1, 4, 16]


def test_sparse_squares_monotone():
    for g in (2, 3, 10):
        table = [[count_sparse_squares(g, m, K) for K in range(1, 9)] for m in range(1, 4)]
        for row in table:
            assert row == sorted(row)
        for col in zip(*table):
            assert list(col) == sorted(col)


def test_nonzero_digits():
    assert nonzero_digits(0, 2) == 0
    assert nonzero_digits(9, 2) == 2
    assert nonzero_digits(1020, 10) == 2


def test_lower_bound_family():
    assert sorted(m.square for m in lower_bound_family(2, 2, 100)) == [4, 9, 16, 25, 36, 64]
    assert sorted(m.square for m in lower_bound_family(2, 1, 100)) == [1, 4, 16, 64]
    assert sorted(m.square for m in lower_bound_family(3, 1, 10)) == [1, 9]
    assert lower_bound_family(2, 3, 8) == []


def test_family_pattern_weight():
    for g, s, N in [(2, 2, 10**4), (3, 3, 10**6), (10, 2, 10**8)]:
        members = lower_bound_family(g, s, N)
        for m in members:
            pattern = m.pattern(g)
            assert sum(c for _, c in pattern) == s * s
            assert sum(c * g**e for e, c in pattern) == m.square
        assert sum(pattern_multiplicities(members, g).values()) == len(members)


def test_gamma():
    assert gamma_m(3) == Fraction(677, 1969)
    assert gamma_m(4) == Fraction(1354, 3323)
    first = next(m for m in range(3, 200) if gamma_m(m) > Fraction(1, 2))
    assert first == 44
    assert abs(gamma_m(10**6) - GAMMA_LIMIT) < Fraction(1, 1000)
    with pytest.raises(DomainError):
        gamma_m(2)
