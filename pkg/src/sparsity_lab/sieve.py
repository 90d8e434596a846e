"""Sieving prime sets and the arithmetic sums attached to them.

A sieving set for base g collects primes l in [z, c1*z] such that the
largest prime factor P(l-1) is at least z**alpha, divides the order of g
mod l, and the 2-adic valuation of that order is one common value u0.
"""

from __future__ import annotations

import io
import math
from collections import defaultdict
from dataclasses import dataclass, field

from .arith import largest_prime_factor, mul_order, primes_in_range, two_adic_valuation
from .errors import DomainError, EmptySet, ZeroInput
from .forms import SparseForm, count_congruence_solutions

DEFAULT_ALPHA = 0.677
DEFAULT_C1 = 2.0


@dataclass(frozen=True)
class SievePrime:
    ell: int
    tau: int
    p_largest: int
    nu2: int


@dataclass(frozen=True)
class SieveSet:
    g: int
    z: float
    alpha: float
    c1: float
    u0: int
    primes: tuple[SievePrime, ...]
    # survivors before the majority decision, grouped by valuation
    class_sizes: dict[int, int] = field(default_factory=dict, compare=False)

    @property
    def ells(self) -> list[int]:
        return [p.ell for p in self.primes]

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def reference_size(self) -> float:
        """z / (log z * log log z), the shape of the asymptotic lower bound (constant omitted)."""
        lz = math.log(self.z)
        return self.z / (lz * math.log(lz)) if lz > 1 else float("nan")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(
            f"# g={self.g},z={_fmt(self.z)},alpha={_fmt(self.alpha)},c1={_fmt(self.c1)},u0={self.u0}\n"
        )
        buf.write("ell,tau,p_largest,nu2\n")
        for p in self.primes:
            buf.write(f"{p.ell},{p.tau},{p.p_largest},{p.nu2}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SieveSet":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#"):
            raise ValueError("missing parameter comment line")
        params = dict(kv.split("=", 1) for kv in lines[0][1:].strip().split(","))
        if lines[1] != "ell,tau,p_largest,nu2":
            raise ValueError(f"unexpected header {lines[1]!r}")
        primes = tuple(SievePrime(*map(int, ln.split(","))) for ln in lines[2:])
        return cls(
            g=int(params["g"]),
            z=float(params["z"]),
            alpha=float(params["alpha"]),
            c1=float(params["c1"]),
            u0=int(params["u0"]),
            primes=primes,
        )


def _fmt(x: float) -> str:
    return format(x, ".17g")


def sieve_candidates(g: int, z: float, alpha: float, c1: float) -> list[SievePrime]:
    """Primes in [z, c1*z] not dividing g that pass the size and divisibility tests."""
    lo, hi = math.ceil(z), math.floor(c1 * z)
    threshold = z**alpha
    out = []
    for ell in primes_in_range(lo, hi):
        if g % ell == 0:
            continue
        p = largest_prime_factor(ell - 1)
        if p < threshold:
            continue
        tau = mul_order(g, ell)
        if tau % p:
            continue
        out.append(SievePrime(ell, tau, p, two_adic_valuation(tau)))
    return out


def build_sieve_set(
    g: int, z: float, alpha: float = DEFAULT_ALPHA, c1: float = DEFAULT_C1
) -> SieveSet:
    if g < 2:
        raise DomainError("g must be >= 2")
    if z < 3:
        raise DomainError("z must be >= 3")
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    if c1 <= 1:
        raise DomainError("c1 must exceed 1")
    survivors = sieve_candidates(g, z, alpha, c1)
    if not survivors:
        raise EmptySet(f"no prime in [{z}, {c1 * z}] survives for g={g}, alpha={alpha}")
    classes: dict[int, list[SievePrime]] = defaultdict(list)
    for p in survivors:
        classes[p.nu2].append(p)
    # ties go to the smaller valuation
    u0 = min(classes, key=lambda u: (-len(classes[u]), u))
    return SieveSet(
        g=g,
        z=z,
        alpha=alpha,
        c1=c1,
        u0=u0,
        primes=tuple(sorted(classes[u0], key=lambda p: p.ell)),
        class_sizes={u: len(v) for u, v in sorted(classes.items())},
    )


def membership_failures(L: SieveSet) -> list[str]:
    """Re-check every member from scratch; returns human-readable failures."""
    problems = []
    ells = L.ells
    if ells != sorted(set(ells)):
        problems.append("primes not strictly increasing")
    for p in L.primes:
        ell = p.ell
        if not L.z <= ell <= L.c1 * L.z:
            problems.append(f"{ell} outside [z, c1*z]")
        if largest_prime_factor(ell - 1) != p.p_largest or p.p_largest < L.z**L.alpha:
            problems.append(f"{ell}: P(l-1) check failed")
        tau = mul_order(L.g, ell)
        if tau != p.tau or tau % p.p_largest:
            problems.append(f"{ell}: P(l-1) does not divide the order")
        if two_adic_valuation(tau) != L.u0 or p.nu2 != L.u0:
            problems.append(f"{ell}: 2-adic valuation differs from u0")
    return problems


def omega_z(n: int, L: SieveSet) -> int:
    if n == 0:
        raise ZeroInput("omega_z is undefined at 0")
    return sum(1 for ell in L.ells if n % ell == 0)


def omega_sum(form: SparseForm, K: int, L: SieveSet) -> tuple[int, float]:
    """Sum of omega_z(F(k)) over the box, and its ratio to (K^m z^-a + K^(m-1)) #L."""
    if K < 1 or len(L) < 1:
        raise DomainError("need K >= 1 and a non-empty sieving set")
    total = sum(count_congruence_solutions(form, K, ell) for ell in L.ells)
    m = form.m
    scale = (K**m * L.z ** (-L.alpha) + K ** (m - 1)) * len(L)
    return total, total / scale


def gcd_sum(L: SieveSet, kappa: float) -> tuple[int | float, float]:
    """D_kappa over ordered pairs with distinct P(l-1), and its ratio to z^(kappa+alpha-alpha*kappa+1)."""
    if len(L) < 1:
        raise DomainError("empty sieving set")
    integral = float(kappa).is_integer()
    value: int | float = 0
    for p in L.primes:
        for q in L.primes:
            if p.p_largest == q.p_largest:
                continue
            d = math.gcd(p.ell - 1, q.ell - 1)
            value += d ** int(kappa) if integral else d**kappa
    a = L.alpha
    return value, value / L.z ** (kappa + a - a * kappa + 1)
