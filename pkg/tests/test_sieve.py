import itertools
import math

import pytest

import oracles
from sparsity_lab.errors import DomainError, EmptySet, ZeroInput
from sparsity_lab.forms import SparseForm
from sparsity_lab.sieve import (
    SievePrime,
    SieveSet,
    build_sieve_set,
    gcd_sum,
    membership_failures,
    omega_sum,
    omega_z,
)

# (g, z, alpha, c1) -> (u0, primes); derived by oracles.sieve_set before freezing
GOLDEN_SETS = {
    (2, 11, 0.5, 3): (0, [23, 31]),
    (2, 11, 0.99, 3): (0, [23]),
    (3, 5, 0.5, 3): (0, [11, 13]),
}


@pytest.fixture
def L():
    return build_sieve_set(2, 11, 0.5, 3)


@pytest.mark.parametrize("key", list(GOLDEN_SETS))
def test_golden_sets(key):
    assert oracles.sieve_set(*key) == GOLDEN_SETS[key]
    S = build_sieve_set(*key)
    assert (S.u0, S.ells) == GOLDEN_SETS[key]
    assert membership_failures(S) == []


def test_class_sizes_recorded(L):
    # survivors 11 (nu2=1), 23 (0), 29 (2), 31 (0)
    assert L.class_sizes == {0: 2, 1: 1, 2: 1}


def test_empty_set():
    with pytest.raises(EmptySet):
        build_sieve_set(2, 11, 0.99, 1.05)


def test_validation():
    for args in [(1, 11), (2, 2), (2, 11, 1.5), (2, 11, 0.5, 1.0)]:
        with pytest.raises(DomainError):
            build_sieve_set(*args)


@pytest.mark.parametrize("g, z, alpha, c1", [(2, 100, 0.6, 2), (3, 200, 0.677, 2), (10, 150, 0.55, 3), (2, 1000, 0.677, 2)])
def test_matches_oracle_scan(g, z, alpha, c1):
    S = build_sieve_set(g, z, alpha, c1)
    assert (S.u0, S.ells) == oracles.sieve_set(g, z, alpha, c1)
    assert membership_failures(S) == []
    for p in S:
        assert (p.ell - 1) % p.tau == 0 and (p.ell - 1) % p.p_largest == 0


def test_membership_failures_detects_tampering(L):
    bad = SieveSet(L.g, L.z, L.alpha, L.c1, L.u0, (SievePrime(29, 28, 7, 2),) + L.primes)
    problems = membership_failures(bad)
    assert any("2-adic" in p for p in problems)
    assert any("increasing" in p for p in problems)


def test_deterministic():
    assert build_sieve_set(2, 500, 0.6, 2) == build_sieve_set(2, 500, 0.6, 2)


def test_csv_round_trip(L):
    text = L.to_csv()
    assert text.splitlines()[1] == "ell,tau,p_largest,nu2"
    assert text.startswith("# g=2,z=11,alpha=0.5,c1=3,u0=0\n")
    assert SieveSet.from_csv(text) == L


@pytest.mark.parametrize("n, w", [(713, 2), (46, 1), (5, 0)])
def test_omega_z(L, n, w):
    assert omega_z(n, L) == w


def test_omega_z_zero(L):
    with pytest.raises(ZeroInput):
        omega_z(0, L)


def test_omega_sum_examples(L):
    total, _ = omega_sum(SparseForm(2, (1, 1)), 4, L)
    direct = sum(omega_z(SparseForm(2, (1, 1))(k), L) for k in itertools.product(range(5), repeat=2))
    assert total == direct == 0
    assert omega_sum(SparseForm(2, (1,)), 9, L)[0] == 0
    total, ratio = omega_sum(SparseForm(2, (23,)), 3, L)
    assert total == 4
    assert ratio == pytest.approx(4 / ((3 * 11**-0.5 + 1) * 2))


def test_omega_sum_matches_factoring():
    L = build_sieve_set(2, 11, 0.5, 3)
    L3 = build_sieve_set(3, 5, 0.5, 3)
    for S, g in ((L, 3), (L3, 2), (L, 2)):
        for m in (1, 2, 3):
            for c in itertools.product((-3, -1, 1, 2, 3), repeat=m):
                if m == 3 and c[0] != 1:
                    continue
                form = SparseForm(g, c)
                for K in (1, 3, 6):
                    direct = 0
                    for k in itertools.product(range(K + 1), repeat=m):
                        v = form(k)
                        if v:
                            direct += sum(1 for p, _ in oracles.factor(abs(v)) if p in S.ells)
                        else:
                            direct += len(S)  # every prime divides 0
                    assert omega_sum(form, K, S)[0] == direct


def test_gcd_sum(L):
    assert gcd_sum(L, 1)[0] == 4
    assert gcd_sum(L, 2)[0] == 8
    single = build_sieve_set(2, 11, 0.99, 3)
    assert gcd_sum(single, 1)[0] == 0
    big = build_sieve_set(2, 300, 0.6, 2)
    value, ratio = gcd_sum(big, 1)
    assert value % 2 == 0
    ref = sum(
        math.gcd(p.ell - 1, q.ell - 1)
        for p in big for q in big if p.p_largest != q.p_largest
    )
    assert value == ref
    assert ratio == pytest.approx(value / 300 ** (1 + 0.6 - 0.6 + 1))
    assert gcd_sum(L, 1.5)[0] == pytest.approx(2 * 2**1.5)


def test_reference_size(L):
    assert L.reference_size() == pytest.approx(11 / (math.log(11) * math.log(math.log(11))))
