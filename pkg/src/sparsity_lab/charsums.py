"""Character and exponential sums over prime fields, with their bounds.

Twisted sums are accumulated exactly as integer vectors of "phase counts":
``coeffs[j]`` is the total weight attached to e(j/period).  The complex
value is only formed at the end, so identities between sums (the product
formula in particular) can be compared as integer vectors first and as
complex numbers second.
"""

from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import budget
from .arith import is_prime, jacobi, mul_order, primitive_root
from .errors import (
    BoundViolation,
    DomainError,
    HypothesisViolated,
    NotCoprime,
    NotCoprimeOrders,
    OddD,
)
from .forms import SparseForm, convolve_mod, count_congruence_solutions, count_square_tuples, residue_histogram
from .sieve import SieveSet, omega_z

COMPLEX_TOL = 1e-9
DEFAULT_SLACK = 4.0


def e(x: float) -> complex:
    return cmath.exp(2j * math.pi * x)


@dataclass(frozen=True)
class PhaseSum:
    """The cyclotomic integer sum_j coeffs[j] * e(j / period)."""

    coeffs: tuple[int, ...]

    @property
    def period(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_array(cls, arr) -> "PhaseSum":
        return cls(tuple(int(x) for x in arr))

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def value(self) -> complex | int:
        if self.is_rational():
            return self.coeffs[0]
        roots = np.exp(2j * np.pi * np.arange(self.period) / self.period)
        return complex(np.sum(np.asarray(self.coeffs, dtype=float) * roots))


def jacobi_array(a: np.ndarray, n: int) -> np.ndarray:
    """Elementwise Jacobi symbol (a_i / n) for odd n."""
    if n < 1 or n % 2 == 0:
        raise DomainError("odd modulus required")
    a = np.mod(np.asarray(a, dtype=np.int64), n)
    nn = np.full_like(a, n)
    res = np.ones_like(a)
    active = a != 0
    while active.any():
        # strip factors of two
        while True:
            even = active & (a % 2 == 0)
            if not even.any():
                break
            a = np.where(even, a // 2, a)
            flip = even & ((nn % 8 == 3) | (nn % 8 == 5))
            res = np.where(flip, -res, res)
        flip = active & (a % 4 == 3) & (nn % 4 == 3)
        res = np.where(flip, -res, res)
        a, nn = np.where(active, nn % np.where(a == 0, 1, a), a), np.where(active, a, nn)
        active = a != 0
    return np.where(nn == 1, res, 0)


def _char_table(modulus: int) -> np.ndarray:
    return jacobi_array(np.arange(modulus), modulus)


def _roll2(arr: np.ndarray, dv: int, dj: int) -> np.ndarray:
    return np.roll(np.roll(arr, dv, axis=0), dj, axis=1)


def _phase_convolve(tables: list[np.ndarray]) -> np.ndarray:
    """2-D cyclic convolution of (residue, phase) weight tables."""
    acc = tables[0]
    for tab in tables[1:]:
        out = np.zeros_like(acc)
        for v, j in zip(*np.nonzero(tab)):
            out += tab[v, j] * _roll2(acc, v, j)
        acc = out
    return acc


def _fold_character(table: np.ndarray, modulus: int) -> PhaseSum:
    chi = _char_table(modulus)
    return PhaseSum.from_array(chi @ table)


# --- complete sums with diagonal forms ----------------------------------------


def _check_field(q: int, d: int, a: Sequence[int]) -> None:
    if q < 3 or not is_prime(q):
        raise DomainError(f"q must be an odd prime, got {q}")
    if math.gcd(d, q) != 1:
        raise HypothesisViolated(f"gcd(d, q) = gcd({d}, {q}) != 1")
    if any(ai % q == 0 for ai in a):
        raise HypothesisViolated("every coefficient a_i must be non-zero mod q")


def diag_sum_bound(q: int, d: int, m: int) -> float:
    return d ** (m - 1) * (q - 1) * q ** ((m - 1) / 2)


def twisted_sum_bound(q: int, d: int, m: int) -> float:
    return d**m * q ** ((m + 1) / 2)


_ROOTS: dict[int, int] = {}


def _root_cache(q: int) -> int:
    if q not in _ROOTS:
        _ROOTS[q] = primitive_root(q)
    return _ROOTS[q]


def _index_table(q: int, root: int) -> list[int]:
    ind = [0] * q
    x = 1
    for k in range(q - 1):
        ind[x] = k
        x = x * root % q
    return ind


def quad_diag_sum(
    q: int,
    d: int,
    a: Sequence[int],
    m: int | None = None,
    budget_limit: int | None = None,
    check: bool = True,
) -> int:
    """Sum over F_q^m of eta(a_1 x_1^d + ... + a_m x_m^d), exactly.

    With ``check``, raises BoundViolation if |S| > d^(m-1)(q-1)q^((m-1)/2).
    """
    a = tuple(a)
    if m is not None and m != len(a):
        raise DomainError("m must equal len(a)")
    m = len(a)
    if d % 2:
        raise OddD(f"d = {d} is odd")
    _check_field(q, d, a)
    budget.check(q**m, budget_limit, "diagonal sum")
    hists = []
    for ai in a:
        h = np.zeros(q, dtype=np.int64)
        for x in range(q):
            h[ai * pow(x, d, q) % q] += 1
        hists.append(h)
    dist = hists[0]
    for h in hists[1:]:
        dist = sum(h[r] * np.roll(dist, r) for r in range(q))
    value = int(_char_table(q) @ dist)
    if check and abs(value) > diag_sum_bound(q, d, m) + 1e-9:
        raise BoundViolation(f"|S| = {abs(value)} exceeds {diag_sum_bound(q, d, m)}")
    return value


def twisted_diag_sum(
    q: int,
    d: int,
    a: Sequence[int],
    chi_exponents: Sequence[int],
    root: int | None = None,
    budget_limit: int | None = None,
) -> complex | int:
    """Sum of eta(sum a_i x_i^d) * prod chi_i(x_i) over F_q^m.

    chi_i(x) = e(c_i * ind(x) / (q-1)) with ind taken to ``root`` (default:
    the smallest primitive root).  A non-principal chi_i vanishes at 0, the
    principal one equals 1 there, so all-zero exponents reproduce
    quad_diag_sum.
    """
    a = tuple(a)
    if len(chi_exponents) != len(a):
        raise DomainError("one character exponent per coefficient")
    _check_field(q, d, a)
    budget.check(q ** len(a), budget_limit, "twisted diagonal sum")
    root = _root_cache(q) if root is None else root
    if mul_order(root, q) != q - 1:
        raise DomainError(f"{root} is not a primitive root mod {q}")
    ind = _index_table(q, root)
    tables = []
    for ai, ci in zip(a, chi_exponents):
        tab = np.zeros((q, q - 1), dtype=np.int64)
        if ci % (q - 1) == 0:
            tab[0, 0] += 1
        for x in range(1, q):
            tab[ai * pow(x, d, q) % q, ci * ind[x] % (q - 1)] += 1
        tables.append(tab)
    return _fold_character(_phase_convolve(tables), q).value()


# --- sums along exponential sequences -----------------------------------------


@dataclass(frozen=True)
class CharSumSpec:
    ell: int
    theta: int
    a: tuple[int, ...]
    b: tuple[int, ...] | None = None
    r: int | None = None
    t_ell: int = field(init=False)
    t_r: int | None = field(init=False)
    t: int = field(init=False)

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        b = tuple(int(x) for x in self.b) if self.b is not None else (0,) * len(a)
        if len(b) != len(a) or not a:
            raise DomainError("a and b must be non-empty and of equal length")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        for p in (self.ell, self.r):
            if p is not None and (p < 3 or not is_prime(p)):
                raise DomainError(f"{p} is not an odd prime")
        if self.r is not None and self.r == self.ell:
            raise DomainError("l and r must be distinct")
        if self.theta < 2:
            raise DomainError("theta must be >= 2")
        prod = math.prod(a) * self.theta
        for p in (self.ell, self.r):
            if p is not None and prod % p == 0:
                raise HypothesisViolated(f"gcd({p}, a_1...a_m * theta) != 1")
        t_ell = mul_order(self.theta, self.ell)
        object.__setattr__(self, "t_ell", t_ell)
        if self.r is None:
            object.__setattr__(self, "t_r", None)
            object.__setattr__(self, "t", t_ell)
        else:
            object.__setattr__(self, "t_r", mul_order(self.theta, self.r))
            object.__setattr__(self, "t", mul_order(self.theta, self.ell * self.r))

    @property
    def m(self) -> int:
        return len(self.a)

    @property
    def modulus(self) -> int:
        return self.ell * (self.r or 1)

    def at(self, ell: int, b: Sequence[int]) -> "CharSumSpec":
        return CharSumSpec(ell=ell, theta=self.theta, a=self.a, b=tuple(b))


@dataclass(frozen=True)
class CrtSplit:
    b_ell: tuple[int, ...]
    b_r: tuple[int, ...]


def crt_split_orders(t_ell: int, t_r: int, b: Sequence[int]) -> CrtSplit:
    if math.gcd(t_ell, t_r) != 1:
        raise NotCoprimeOrders(f"gcd({t_ell}, {t_r}) != 1")
    t = t_ell * t_r
    inv_r = pow(t_r, -1, t_ell) if t_ell > 1 else 0
    inv_l = pow(t_ell, -1, t_r) if t_r > 1 else 0
    b_ell = tuple(bi * inv_r % t_ell for bi in b)
    b_r = tuple(bi * inv_l % t_r for bi in b)
    for bi, x, y in zip(b, b_ell, b_r):
        if (x * t_r + y * t_ell - bi) % t:
            raise AssertionError("CRT back-substitution failed")  # pragma: no cover
    return CrtSplit(b_ell, b_r)


def crt_split(spec: CharSumSpec) -> CrtSplit:
    if spec.r is None:
        raise DomainError("crt_split needs two moduli")
    return crt_split_orders(spec.t_ell, spec.t_r, spec.b)


def _single_modulus_sum(ell: int, theta: int, a, b) -> PhaseSum:
    t = mul_order(theta, ell)
    tables = []
    for ai, bi in zip(a, b):
        tab = np.zeros((ell, t), dtype=np.int64)
        y = theta % ell
        for x in range(1, t + 1):
            tab[ai * y % ell, bi * x % t] += 1
            y = y * theta % ell
        tables.append(tab)
    return _fold_character(_phase_convolve(tables), ell)


def s_ell_exact(spec: CharSumSpec) -> PhaseSum:
    return _single_modulus_sum(spec.ell, spec.theta, spec.a, spec.b)


def s_ell(spec: CharSumSpec) -> complex | int:
    """Sum over x in [1, t_l]^m of ((sum a_i theta^x_i) / l) e((b . x) / t_l).

    An int when all b_i vanish, a complex number otherwise.
    """
    return s_ell_exact(spec).value()


def single_sum_bound(spec: CharSumSpec, slack: float = DEFAULT_SLACK) -> float:
    """slack * l^((m+1)/2) in general, slack * t_l l^((m-1)/2) for b = 0 (needs t_l odd)."""
    m, ell = spec.m, spec.ell
    if any(spec.b):
        return slack * ell ** ((m + 1) / 2)
    if spec.t_ell % 2 == 0:
        raise HypothesisViolated(f"t_l = {spec.t_ell} is even")
    return slack * spec.t_ell * ell ** ((m - 1) / 2)


def _direct_product_sum(spec: CharSumSpec, budget_limit: int | None) -> PhaseSum:
    mod, t, theta = spec.modulus, spec.t, spec.theta
    budget.check(t**spec.m, budget_limit, "product-formula sum")
    k = np.arange(1, t + 1, dtype=np.int64)
    powers = np.array([pow(theta, int(x), mod) for x in k], dtype=np.int64)
    resid = [ai * powers % mod for ai in spec.a]
    phase = [bi * k % t for bi in spec.b]
    out = np.zeros(t, dtype=np.int64)
    rest_r = np.zeros(1, dtype=np.int64)
    rest_p = np.zeros(1, dtype=np.int64)
    for ri, pi in zip(resid[1:], phase[1:]):
        rest_r = (rest_r[:, None] + ri[None, :]).ravel() % mod
        rest_p = (rest_p[:, None] + pi[None, :]).ravel() % t
    # loop over the leading index, vectorize the rest
    for r0, p0 in zip(resid[0], phase[0]):
        chi = jacobi_array((rest_r + r0) % mod, mod)
        out += np.bincount((rest_p + p0) % t, weights=chi, minlength=t).astype(np.int64)
    return PhaseSum.from_array(out)


def _lift(s_l: PhaseSum, s_r: PhaseSum, t_ell: int, t_r: int) -> PhaseSum:
    t = t_ell * t_r
    out = np.zeros(t, dtype=np.int64)
    for x, cx in enumerate(s_l.coeffs):
        if cx:
            for y, cy in enumerate(s_r.coeffs):
                if cy:
                    out[(x * t_r + y * t_ell) % t] += cx * cy
    return PhaseSum.from_array(out)


@dataclass(frozen=True)
class ProductCheck:
    S: complex | int
    S_ell: complex | int
    S_r: complex | int
    exact_match: bool
    abs_error: float


def product_sum_check(spec: CharSumSpec, budget_limit: int | None = None) -> ProductCheck:
    if spec.r is None:
        raise DomainError("product_sum needs two moduli")
    if math.gcd(spec.t_ell, spec.t_r) != 1:
        raise HypothesisViolated(f"gcd(t_l, t_r) = gcd({spec.t_ell}, {spec.t_r}) != 1")
    split = crt_split(spec)
    direct = _direct_product_sum(spec, budget_limit)
    s_l = _single_modulus_sum(spec.ell, spec.theta, spec.a, split.b_ell)
    s_r = _single_modulus_sum(spec.r, spec.theta, spec.a, split.b_r)
    lifted = _lift(s_l, s_r, spec.t_ell, spec.t_r)
    S, Sl, Sr = direct.value(), s_l.value(), s_r.value()
    err = abs(complex(S) - complex(Sl) * complex(Sr))
    return ProductCheck(S, Sl, Sr, direct == lifted, err)


def product_sum(spec: CharSumSpec, budget_limit: int | None = None):
    """(S, S_l, S_r) with S computed directly over [1, t]^m and checked against S_l * S_r."""
    chk = product_sum_check(spec, budget_limit)
    if not any(spec.b):
        if chk.S != chk.S_ell * chk.S_r:
            raise BoundViolation(f"S = {chk.S} but S_l * S_r = {chk.S_ell * chk.S_r}")
    elif chk.abs_error > COMPLEX_TOL:
        raise BoundViolation(f"|S - S_l S_r| = {chk.abs_error:.3e}")
    return chk.S, chk.S_ell, chk.S_r


def product_sum_bound(spec: CharSumSpec, slack: float = DEFAULT_SLACK) -> float:
    m, n = spec.m, spec.modulus
    if any(spec.b):
        return slack * n ** ((m + 1) / 2)
    return slack * spec.t * n ** ((m - 1) / 2)


def _require_incomplete(spec: CharSumSpec) -> None:
    if spec.r is None:
        raise HypothesisViolated("two moduli are required")
    if math.gcd(spec.t_ell, spec.t_r) != 1:
        raise HypothesisViolated("gcd(t_l, t_r) != 1")
    if (spec.t_ell * spec.t_r) % 2 == 0:
        raise HypothesisViolated("t_l * t_r must be odd")


def incomplete_sum_bound(spec: CharSumSpec, L_bounds: Sequence[int]) -> float:
    m, n, t = spec.m, spec.modulus, spec.t
    L = max(L_bounds)
    first = math.prod(L_bounds) * t ** (-m + 1) * n ** ((m - 1) / 2)
    second = (L ** (m - 1) * t ** (-m + 1) + 1) * n ** ((m + 1) / 2) * math.log(n) ** m
    return first + second


def incomplete_sum(spec: CharSumSpec, L_bounds: Sequence[int]) -> tuple[int, float]:
    """Exact sum over 1 <= k_i <= L_i of ((sum a_i theta^k_i) / (l r)), with the reference bound."""
    if any(spec.b):
        raise DomainError("incomplete sums take no twist")
    _require_incomplete(spec)
    if len(L_bounds) != spec.m or any(L < 0 for L in L_bounds):
        raise DomainError("one non-negative length per coefficient")
    mod = spec.modulus
    if min(L_bounds) == 0:
        return 0, incomplete_sum_bound(spec, [max(1, L) for L in L_bounds])
    hists = [residue_histogram(ai, spec.theta, L, mod, start=1) for ai, L in zip(spec.a, L_bounds)]
    dist: Counter = Counter({0: 1})
    for h in hists:
        dist = convolve_mod(dist, h, mod)
    value = sum(cnt * jacobi(v, mod) for v, cnt in dist.items())
    return value, incomplete_sum_bound(spec, L_bounds)


# --- one-sequence sums and solution counts -------------------------------------------------------------


def korobov_sum(
    a: int, theta: int, ell: int, denominator: str = "ell", check: bool = True
) -> complex:
    """Sum over k in [1, t] of e(a theta^k / ell), t the order of theta mod ell.

    ``denominator="t"`` evaluates the variant e(a theta^k / t) for comparison;
    only the default form is checked against sqrt(ell).
    """
    if math.gcd(ell, a * theta) != 1:
        raise NotCoprime(f"gcd({ell}, a*theta) != 1")
    t = mul_order(theta, ell)
    den = {"ell": ell, "t": t}.get(denominator)
    if den is None:
        raise DomainError("denominator must be 'ell' or 't'")
    counts = np.zeros(den, dtype=np.int64)
    for k in range(1, t + 1):
        counts[a * pow(theta, k, den) % den] += 1
    value = complex(PhaseSum.from_array(counts).value())
    if check and denominator == "ell" and abs(value) > math.sqrt(ell) + COMPLEX_TOL:
        raise BoundViolation(f"|korobov sum| = {abs(value)} > sqrt({ell})")
    return value


def trivial_t_bound(form: SparseForm, K: int, ell: int) -> float:
    tau = mul_order(form.g, ell)
    return (K + 1) ** (form.m - 1) * ((K + 1) / tau + 1)


def sieve_count_bound(m: int, K: int, z: float, alpha: float) -> float:
    return K**m / z + K**m * z ** (m / 2 - alpha * (m - 1) - 1)


def t_m_count(form: SparseForm, K: int, ell: int) -> int:
    """Solutions of F(k) == 0 (mod l) with k in {0..K}^m, by residue cycling.

    Checks the trivial bound (K+1)^(m-1) ((K+1)/tau + 1) whenever some
    coefficient is a unit mod l (it can fail otherwise).
    """
    if form.g % ell == 0:
        raise NotCoprime(f"{ell} divides g")
    count = count_congruence_solutions(form, K, ell)
    if any(c % ell for c in form.coeffs):
        bound = trivial_t_bound(form, K, ell)
        if count > bound + 1e-9:
            raise BoundViolation(f"T = {count} exceeds the trivial bound {bound}")
    return count


def t_m_report(form: SparseForm, K: int, ell: int, L: SieveSet | None = None, slack: float = DEFAULT_SLACK) -> dict:
    count = t_m_count(form, K, ell)
    report = {"count": count, "trivial_bound": trivial_t_bound(form, K, ell)}
    if L is not None and form.m >= 3 and K >= L.z and ell in L.ells:
        ref = sieve_count_bound(form.m, K, L.z, L.alpha)
        report.update(sieve_count_bound=ref, ratio=count / ref, within_slack=count <= slack * ref)
    return report


# --- square sieve statistics ----------------------------------------------------


@dataclass(frozen=True)
class SieveStatistics:
    M: int
    W: int
    U: int
    V: int
    identity_checked: int
    zero_hits: int
    term_km_z_alpha: float
    term_km1: float
    term_z2_W: float
    term_z2_V: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _box_residues(form: SparseForm, K: int, mod: int) -> np.ndarray:
    acc = np.zeros(1, dtype=np.int64)
    for c in form.coeffs:
        col = np.array([c * pow(form.g, k, mod) % mod for k in range(K + 1)], dtype=np.int64)
        acc = (acc[:, None] + col[None, :]).ravel() % mod
    return acc


def sieve_statistics(
    form: SparseForm, K: int, L: SieveSet, budget_limit: int | None = None
) -> SieveStatistics:
    """Exact M, W, U, V over the box {0..K}^m for the sieving set L.

    W is summed as sum_k |sum_l (F/l)|^2; U and V as pair sums of (F/(l r))
    split by whether P(l-1) = P(r-1).  Both routes must give W = U + V.
    """
    size = (K + 1) ** form.m
    budget.check(size * (len(L) ** 2 + len(L)), budget_limit, "sieve statistics")
    single = {p.ell: jacobi_array(_box_residues(form, K, p.ell), p.ell) for p in L.primes}
    inner = sum(single.values())
    W = int(np.dot(inner, inner))
    U = V = 0
    for p in L.primes:
        for q in L.primes:
            mod = p.ell * q.ell
            if p.ell == q.ell:
                # (F / l^2) is 1 off multiples of l
                val = int(np.count_nonzero(single[p.ell]))
            else:
                val = int(jacobi_array(_box_residues(form, K, mod), mod).sum())
            if p.p_largest == q.p_largest:
                U += val
            else:
                V += val
    if W != U + V:
        raise BoundViolation(f"W = {W} but U + V = {U + V}")
    M, hits = count_square_tuples(form, K, method="mitm", include_zero=True, budget_limit=budget_limit)
    checked = zeros = 0
    for h in hits:
        if h.value == 0:
            zeros += 1
            continue
        lhs = sum(jacobi(h.value, ell) for ell in L.ells)
        if lhs != len(L) - omega_z(h.value, L):
            raise BoundViolation(f"sieve identity fails at k = {h.k}")
        checked += 1
    M -= zeros
    m, z, a = form.m, L.z, L.alpha
    return SieveStatistics(
        M=M,
        W=W,
        U=U,
        V=V,
        identity_checked=checked,
        zero_hits=zeros,
        term_km_z_alpha=K**m * z ** (-a),
        term_km1=float(K ** (m - 1)),
        term_z2_W=W / z**2,
        term_z2_V=V / z**2,
    )

