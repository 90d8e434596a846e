"""Exact integer primitives: primality, factoring, orders, Jacobi symbols.

Everything here is a pure function of Python ints, so arbitrary-size inputs
are handled exactly.  Primality is deterministic below 2**64 (and in fact
below 3.3e24, where the fixed Miller-Rabin base set is proven).  Above that
a seeded Miller-Rabin run with 64 extra random bases is used, so a composite
is misreported with probability below 4**-64 = 2**-128.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import reduce

from .errors import EvenModulus, NotCoprime, WorkloadExceeded

DEFAULT_FACTOR_BOUND = 2**64

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)
# Bases 2..37 make Miller-Rabin deterministic for n < 3317044064679887385961981.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981
_MR_EXTRA_ROUNDS = 64


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def value(self) -> int:
        return math.prod(p**e for p, e in self.factors)

    def divisors(self) -> list[int]:
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)

    def totient(self) -> int:
        return math.prod((p - 1) * p ** (e - 1) for p, e in self.factors)


def _miller_rabin_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if not all(_miller_rabin_round(n, d, s, a) for a in _MR_BASES):
        return False
    if n < _MR_DETERMINISTIC_LIMIT:
        return True
    rng = random.Random(n)  # seeded so that repeated calls agree
    return all(
        _miller_rabin_round(n, d, s, rng.randrange(2, n - 1))
        for _ in range(_MR_EXTRA_ROUNDS)
    )


def primes_in_range(lo: int, hi: int) -> list[int]:
    """All primes p with lo <= p <= hi (segmented Eratosthenes)."""
    lo = max(lo, 2)
    if hi < lo:
        return []
    root = math.isqrt(hi)
    base = bytearray([1]) * (root + 1)
    for i in range(min(2, root + 1)):
        base[i] = 0
    for p in range(2, math.isqrt(root) + 1):
        if base[p]:
            base[p * p :: p] = bytearray(len(base[p * p :: p]))
    seg = bytearray([1]) * (hi - lo + 1)
    for p in range(2, root + 1):
        if not base[p]:
            continue
        start = max(p * p, (lo + p - 1) // p * p)
        seg[start - lo :: p] = bytearray(len(seg[start - lo :: p]))
    return [lo + i for i, flag in enumerate(seg) if flag]


def _pollard_brent(n: int, seed: int) -> int:
    rng = random.Random(seed)
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    return g


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    seed = 0
    while True:
        d = _pollard_brent(n, seed)
        if 1 < d < n:
            break
        seed += 1
    _split(d, out)
    _split(n // d, out)


def factorize(n: int, bound: int = DEFAULT_FACTOR_BOUND) -> Factorization:
    """Complete factorization of ``n`` (2 <= n <= bound)."""
    if n < 2:
        raise ValueError(f"factorize needs n >= 2, got {n}")
    if n > bound:
        raise WorkloadExceeded(f"{n} exceeds the factorization bound {bound}")
    found: dict[int, int] = {}
    rest = n
    for p in range(2, 1000):
        if p * p > rest:
            break
        while rest % p == 0:
            found[p] = found.get(p, 0) + 1
            rest //= p
    _split(rest, found)
    return Factorization(n, tuple(sorted(found.items())))


def largest_prime_factor(n: int, bound: int = DEFAULT_FACTOR_BOUND) -> int:
    return factorize(n, bound).factors[-1][0]


def two_adic_valuation(s: int) -> int:
    if s < 1:
        raise ValueError("two_adic_valuation needs s >= 1")
    return (s & -s).bit_length() - 1


def mul_order(g: int, q: int, bound: int = DEFAULT_FACTOR_BOUND) -> int:
    """Least tau >= 1 with g**tau == 1 (mod q).

    Starts from the group order phi(q) and strips prime factors while the
    power stays 1, so the cost is polylogarithmic once phi(q) is factored.
    """
    if q < 2:
        raise ValueError("modulus must be >= 2")
    if math.gcd(g, q) != 1:
        raise NotCoprime(f"gcd({g}, {q}) = {math.gcd(g, q)}")
    if q == 2:
        return 1
    order = factorize(q, bound).totient()
    if order == 1:
        return 1
    for p, _ in factorize(order, bound).factors:
        while order % p == 0 and pow(g, order // p, q) == 1:
            order //= p
    return order


def lcm(*values: int) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def jacobi(a: int, q: int) -> int:
    """Jacobi symbol (a/q) for odd q >= 1."""
    if q < 1 or q % 2 == 0:
        raise EvenModulus(f"Jacobi symbol needs an odd positive modulus, got {q}")
    a %= q
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if q % 8 in (3, 5):
                result = -result
        a, q = q, a
        if a % 4 == 3 and q % 4 == 3:
            result = -result
        a %= q
    return result if q == 1 else 0


def square_root(n: int) -> int | None:
    """Exact non-negative square root of ``n`` or None when n is not a square."""
    if n < 0:
        return None
    j = math.isqrt(n)
    return j if j * j == n else None


def is_perfect_square(n: int) -> bool:
    return square_root(n) is not None


def primitive_root(p: int) -> int:
    """Smallest primitive root modulo the odd prime ``p``."""
    if p == 2:
        return 1
    qs = factorize(p - 1).primes()
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise ValueError(f"{p} has no primitive root")  # unreachable for primes
