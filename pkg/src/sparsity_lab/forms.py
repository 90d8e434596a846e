"""Sparse forms F(k) = sum c_i g**k_i and the square counts built on them.

The exponent box is always {0, ..., K}**m.  Values are exact Python ints,
so F(k) may run to thousands of bits.  Square detection uses ``math.isqrt``;
the meet-in-the-middle path first rejects candidates whose residue is not a
square modulo a few small moduli, and only then touches big integers.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import budget
from .arith import square_root
from .errors import DomainError, OracleMismatch


@dataclass(frozen=True)
class SparseForm:
    g: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if self.g < 2:
            raise DomainError(f"base g must be >= 2, got {self.g}")
        if not self.coeffs:
            raise DomainError("a sparse form needs at least one coefficient")
        if any(c == 0 for c in self.coeffs):
            raise DomainError("coefficients must be non-zero")

    @property
    def m(self) -> int:
        return len(self.coeffs)

    def __call__(self, k: Sequence[int]) -> int:
        return eval_form(self, k)


@dataclass(frozen=True)
class SquareHit:
    k: tuple[int, ...]
    value: int
    root: int

    @property
    def is_zero(self) -> bool:
        return self.value == 0


def eval_form(form: SparseForm, k: Sequence[int]) -> int:
    if len(k) != form.m:
        raise DomainError(f"expected {form.m} exponents, got {len(k)}")
    if any(ki < 0 for ki in k):
        raise DomainError("exponents must be non-negative")
    return sum(c * form.g**ki for c, ki in zip(form.coeffs, k))


def box_size(m: int, K: int) -> int:
    return (K + 1) ** m


# --- residue cycling -------------------------------------------------------


def residue_histogram(c: int, g: int, K: int, modulus: int, start: int = 0) -> Counter:
    """Counts of c*g**k mod modulus for start <= k <= K.

    Only one period of g mod modulus is walked; full periods are multiplied
    out, so the cost does not grow with K.
    """
    hist: Counter = Counter()
    n_terms = K - start + 1
    if n_terms <= 0:
        return hist
    cycle = []
    x = c * pow(g, start, modulus) % modulus
    # Residues of c*g**k eventually cycle; for gcd(g, modulus) = 1 the cycle is pure.
    seen: dict[int, int] = {}
    while x not in seen and len(cycle) < n_terms:
        seen[x] = len(cycle)
        cycle.append(x)
        x = x * g % modulus
    if len(cycle) == n_terms:
        hist.update(cycle)
        return hist
    mu = seen[x]  # pre-period length
    lam = len(cycle) - mu
    hist.update(cycle[:mu])
    rest = n_terms - mu
    full, partial = divmod(rest, lam)
    loop = cycle[mu:]
    if full:
        for r in loop:
            hist[r] += full
    hist.update(loop[:partial])
    return hist


def convolve_mod(a: dict, b: dict, modulus: int) -> Counter:
    out: Counter = Counter()
    for ra, ca in a.items():
        for rb, cb in b.items():
            out[(ra + rb) % modulus] += ca * cb
    return out


def count_congruence_solutions(form: SparseForm, K: int, modulus: int) -> int:
    """#{k in {0..K}**m : F(k) == 0 (mod modulus)} by residue cycling."""
    hists = [residue_histogram(c, form.g, K, modulus) for c in form.coeffs]
    dist: Counter = Counter({0: 1})
    for h in hists[:-1]:
        dist = convolve_mod(dist, h, modulus)
    last = hists[-1]
    return sum(cnt * last.get((-r) % modulus, 0) for r, cnt in dist.items())


# --- square counting -------------------------------------------------------

# Filter moduli chosen so that non-squares are rejected quickly: the fraction
# of residues that are squares is about 12/64, 16/63, 21/65, 6/11.
_FILTER_MODULI = (64, 63, 65, 11)


def _square_table(modulus: int) -> np.ndarray:
    table = np.zeros(modulus, dtype=bool)
    table[[(x * x) % modulus for x in range(modulus)]] = True
    return table


_SQUARE_TABLES = {q: _square_table(q) for q in _FILTER_MODULI}


def _hit_or_none(k: tuple[int, ...], value: int, include_zero: bool) -> SquareHit | None:
    root = square_root(value)
    if root is None or (root == 0 and not include_zero):
        return None
    return SquareHit(k, value, root)


def _brute_hits(form: SparseForm, K: int, include_zero: bool) -> list[SquareHit]:
    terms = [[c * form.g**k for k in range(K + 1)] for c in form.coeffs]
    hits = []
    for k in itertools.product(range(K + 1), repeat=form.m):
        value = sum(terms[i][ki] for i, ki in enumerate(k))
        hit = _hit_or_none(k, value, include_zero)
        if hit is not None:
            hits.append(hit)
    return hits


def _half_sums(form: SparseForm, idx: Sequence[int], K: int):
    tuples = list(itertools.product(range(K + 1), repeat=len(idx)))
    values = [sum(form.coeffs[i] * form.g**t for i, t in zip(idx, tup)) for tup in tuples]
    residues = {q: np.array([v % q for v in values], dtype=np.int64) for q in _FILTER_MODULI}
    return tuples, values, residues


def _mitm_hits(form: SparseForm, K: int, include_zero: bool) -> list[SquareHit]:
    split = (form.m + 1) // 2
    left_idx, right_idx = list(range(split)), list(range(split, form.m))
    lt, lv, lres = _half_sums(form, left_idx, K)
    if right_idx:
        rt, rv, rres = _half_sums(form, right_idx, K)
    else:
        rt, rv = [()], [0]
        rres = {q: np.zeros(1, dtype=np.int64) for q in _FILTER_MODULI}
    hits = []
    for i in range(len(lt)):
        mask = np.ones(len(rt), dtype=bool)
        for q in _FILTER_MODULI:
            mask &= _SQUARE_TABLES[q][(lres[q][i] + rres[q]) % q]
        for j in np.flatnonzero(mask):
            hit = _hit_or_none(lt[i] + rt[j], lv[i] + rv[j], include_zero)
            if hit is not None:
                hits.append(hit)
    hits.sort(key=lambda h: h.k)
    return hits


def square_hits(
    form: SparseForm,
    K: int,
    method: str = "mitm",
    include_zero: bool = False,
    budget_limit: int | None = None,
) -> list[SquareHit]:
    if K < 0:
        raise DomainError("K must be >= 0")
    budget.check(box_size(form.m, K), budget_limit, "exponent box")
    if method == "brute":
        return _brute_hits(form, K, include_zero)
    if method == "mitm":
        return _mitm_hits(form, K, include_zero)
    raise DomainError(f"unknown method {method!r}")


def count_square_tuples(
    form: SparseForm,
    K: int,
    method: str = "brute",
    include_zero: bool = False,
    budget_limit: int | None = None,
) -> tuple[int, list[SquareHit]]:
    """Number of k in {0..K}**m with F(k) a perfect square, plus witnesses.

    Hits come back in lexicographic order of k.  By default F(k) = 0 is not
    counted; pass ``include_zero=True`` to count it (its hit reports
    ``is_zero``).
    """
    hits = square_hits(form, K, method, include_zero, budget_limit)
    return len(hits), hits


def derive_box_cap(form: SparseForm, N: int) -> int:
    """Smallest K with g**K > (sum |c_i|) * N**2."""
    if N < 1:
        raise DomainError("N must be >= 1")
    target = sum(abs(c) for c in form.coeffs) * N * N
    K, power = 0, 1
    while power <= target:
        power *= form.g
        K += 1
    return K


def box_cap_derivation(form: SparseForm, N: int) -> str:
    K = derive_box_cap(form, N)
    weight = sum(abs(c) for c in form.coeffs)
    same_sign = all(c > 0 for c in form.coeffs) or all(c < 0 for c in form.coeffs)
    text = (
        f"K={K}: smallest K with {form.g}^K > {weight}*{N}^2. "
        f"A tuple whose largest exponent exceeds K has a term of size >= g^K > N^2."
    )
    if same_sign:
        text += " All coefficients share a sign, so no cancellation occurs and the box is exhaustive."
    else:
        text += (
            " Coefficients have mixed signs; tuples whose top exponents sit within a bounded"
            " gap can cancel and are covered only after merging the top two terms."
        )
    return text


def count_representable_n(
    form: SparseForm,
    N: int,
    K: int | None = None,
    method: str = "mitm",
    budget_limit: int | None = None,
) -> tuple[int, list[int]]:
    """Distinct n in [1, N] with n**2 = F(k) for some k in the box."""
    if K is None:
        K = derive_box_cap(form, N)
    roots = {h.root for h in square_hits(form, K, method, False, budget_limit) if h.root <= N}
    witnesses = sorted(roots)
    return len(witnesses), witnesses


# --- sparse digit squares ----------------------------------------------------


def nonzero_digits(n: int, g: int) -> int:
    if g == 2:
        return bin(n).count("1")
    count = 0
    while n:
        n, d = divmod(n, g)
        count += d != 0
    return count


def _sparse_squares_scan(g: int, m: int, K: int) -> set[int]:
    limit = g**K
    return {
        n * n
        for n in range(1, math.isqrt(limit - 1) + 1)
        if nonzero_digits(n * n, g) <= m
    }


def _sparse_squares_patterns(g: int, m: int, K: int) -> set[int]:
    found = set()
    powers = [g**i for i in range(K)]
    for j in range(1, min(m, K) + 1):
        for positions in itertools.combinations(range(K), j):
            for digits in itertools.product(range(1, g), repeat=j):
                value = sum(d * powers[p] for d, p in zip(digits, positions))
                if square_root(value) is not None:
                    found.add(value)
    return found


def _pattern_count(g: int, m: int, K: int) -> int:
    return sum(math.comb(K, j) * (g - 1) ** j for j in range(1, min(m, K) + 1))


def sparse_squares(g: int, m: int, K: int, budget_limit: int | None = None) -> list[int]:
    """Squares 1 <= s < g**K with at most m non-zero base-g digits.

    Computed by scanning roots and by enumerating digit patterns; the two
    sets must coincide.
    """
    if g < 2 or m < 1 or K < 1:
        raise DomainError("need g >= 2, m >= 1, K >= 1")
    budget.check(math.isqrt(g**K) + _pattern_count(g, m, K), budget_limit, "sparse square search")
    by_scan = _sparse_squares_scan(g, m, K)
    by_pattern = _sparse_squares_patterns(g, m, K)
    if by_scan != by_pattern:
        raise OracleMismatch(
            f"scan and pattern routes disagree: {sorted(by_scan ^ by_pattern)[:10]}"
        )
    return sorted(by_scan)


def count_sparse_squares(g: int, m: int, K: int, budget_limit: int | None = None) -> int:
    return len(sparse_squares(g, m, K, budget_limit))


# --- lower bound construction ----------------------------------------------


@dataclass(frozen=True)
class FamilyMember:
    square: int
    exponents: tuple[int, ...]

    def pattern(self, g: int) -> tuple[tuple[int, int], ...]:
        """Coefficients of (sum g**h_i)**2 before carrying, as (exponent, coeff)."""
        coeffs: Counter = Counter()
        for a in self.exponents:
            for b in self.exponents:
                coeffs[a + b] += 1
        return tuple(sorted(coeffs.items()))


def family_exponent_cap(g: int, s: int, N: int) -> int:
    """Largest H with s**2 * g**(2H) <= N, or -1 when N < s**2."""
    H = -1
    while s * s * g ** (2 * (H + 1)) <= N:
        H += 1
    return H


def lower_bound_family(g: int, s: int, N: int) -> list[FamilyMember]:
    """All (g**h_1 + ... + g**h_s)**2 with h_1 <= ... <= h_s <= H."""
    if s < 1:
        raise DomainError("s must be >= 1")
    H = family_exponent_cap(g, s, N)
    members = []
    for hs in itertools.combinations_with_replacement(range(H + 1), s):
        square = sum(g**h for h in hs) ** 2
        assert square <= N
        members.append(FamilyMember(square, hs))
    return members


def pattern_multiplicities(members: Iterable[FamilyMember], g: int) -> dict[tuple[int, ...], int]:
    """How often each shape of pre-carry coefficients (c_1, ..., c_t) occurs."""
    counts: dict[tuple[int, ...], int] = defaultdict(int)
    for member in members:
        counts[tuple(c for _, c in member.pattern(g))] += 1
    return dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))


# --- saving exponent ---------------------------------------------------------


def gamma_m(m: int) -> Fraction:
    if m < 3:
        raise DomainError("gamma_m is defined for m >= 3")
    if m == 3:
        return Fraction(677, 1969)
    return Fraction(677 * m, 1323 * m + 1354)


GAMMA_LIMIT = Fraction(677, 1323)
