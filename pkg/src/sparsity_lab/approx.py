"""Bounded-exponent search for |Q(n) - sum c_i lam**k_i| <= B, and the
lacunary two-base counterexample verified in interval arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np
from mpmath import iv, ldexp, mpf

from . import budget
from .errors import DegenerateInstance, DomainError, PrecisionInsufficient

Number = complex | float | Fraction | int


def _is_rational(x) -> bool:
    return isinstance(x, Rational)


@dataclass(frozen=True)
class ApproxInstance:
    q_coeffs: tuple  # a_0, ..., a_d
    lam: Number
    c: tuple
    B: Number = 0

    def __post_init__(self):
        coeffs = list(self.q_coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) < 2:
            raise DegenerateInstance("Q must be non-constant")
        if abs(self.lam) <= 1:
            raise DegenerateInstance("|lambda| must exceed 1")
        if not self.c or any(ci == 0 for ci in self.c):
            raise DegenerateInstance("coefficients c_i must be non-zero")
        if self.B < 0:
            raise DegenerateInstance("B must be >= 0")
        object.__setattr__(self, "q_coeffs", tuple(coeffs))
        object.__setattr__(self, "c", tuple(self.c))

    @property
    def d(self) -> int:
        return len(self.q_coeffs) - 1

    @property
    def m(self) -> int:
        return len(self.c)

    @property
    def exact(self) -> bool:
        return all(_is_rational(x) for x in (*self.q_coeffs, self.lam, *self.c, self.B))

    def Q(self, n):
        acc = 0
        for a in reversed(self.q_coeffs):
            acc = acc * n + a
        return acc

    def scaled(self, s) -> "ApproxInstance":
        return ApproxInstance(
            tuple(s * a for a in self.q_coeffs), self.lam, tuple(s * ci for ci in self.c), s * self.B
        )


@dataclass(frozen=True)
class InstanceConstants:
    n0: int
    delta: int
    b0: float


def _growth_threshold(inst: ApproxInstance) -> int:
    """n0 such that |Q(n)| <= 2|a_d| n^d and |Q(n1+n2) - Q(n1)| > 2B for n, n1, n2 >= n0.

    For x >= 1 and j < d, (x+h)^j - x^j <= ((x+h)^d - x^d) / x, so with
    A = sum_{j<d} |a_j| the difference is at least ((x+h)^d - x^d)(|a_d| - A/x).
    Taking x >= 2A/|a_d| leaves half the leading term, which is >= |a_d| n0^d / 2.
    """
    ad = abs(inst.q_coeffs[-1])
    A = sum(abs(a) for a in inst.q_coeffs[:-1])
    n0 = max(1, math.ceil(2 * A / ad))
    n0 = max(n0, math.floor((4 * abs(inst.B) / ad) ** (1 / inst.d)) + 1)
    return n0


def _verify_threshold(inst: ApproxInstance, n0: int, span: int = 40) -> None:
    ad = abs(inst.q_coeffs[-1])
    for n in range(n0, n0 + span):
        if abs(inst.Q(n)) > 2 * ad * n**inst.d * (1 + 1e-12):
            raise AssertionError(f"growth inequality fails at n = {n}")
    for n1 in range(n0, n0 + span, 3):
        for n2 in range(n0, n0 + span, 3):
            if not abs(inst.Q(n1 + n2) - inst.Q(n1)) > 2 * inst.B:
                raise AssertionError(f"spacing inequality fails at ({n1}, {n2})")


def instance_constants(inst: ApproxInstance, verify: bool = True) -> InstanceConstants:
    n0 = _growth_threshold(inst)
    if verify:
        _verify_threshold(inst, n0)
    lam = abs(inst.lam)
    mags = [abs(ci) for ci in inst.c]
    total = sum(mags)
    # Any coefficient may sit on the top exponent, so take the worst choice.
    delta = 0
    for top in mags:
        need = 2 * (total - top) + top
        k = 0
        while top * lam**k < need:
            k += 1
        delta = max(delta, k)
    ad = abs(inst.q_coeffs[-1])
    weakest = min(mags)
    C = max(0.0, math.log(2 * (2 * ad + abs(inst.B)) / weakest))
    b0 = max(C, inst.d) / math.log(lam)
    return InstanceConstants(n0=n0, delta=delta, b0=b0)


def exponent_cap(inst: ApproxInstance, N: int) -> int:
    return math.floor(instance_constants(inst, verify=False).b0 * (1 + math.log(N)))


@dataclass(frozen=True)
class Representation:
    n: int
    k: tuple[int, ...]
    residual: float


def _candidates(inst: ApproxInstance, target, N: int) -> range | list[int]:
    """Integers n in [1, N] that can satisfy |Q(n) - target| <= B.

    Every such n lies within (B/|a_d|)^(1/d) of the real part of a root of
    Q(x) - target; a unit margin absorbs floating error in the roots.
    """
    poly = [complex(a) for a in reversed(inst.q_coeffs)]
    poly[-1] -= complex(target)
    radius = (float(abs(inst.B)) / abs(complex(inst.q_coeffs[-1]))) ** (1 / inst.d) + 1
    out: set[int] = set()
    for root in np.roots(poly):
        x = root.real
        slack = radius + 1e-9 * abs(root)
        lo, hi = max(1, math.ceil(x - slack)), min(N, math.floor(x + slack))
        out.update(range(lo, hi + 1))
    return sorted(out)


def search_representations(
    inst: ApproxInstance,
    N: int,
    k_lo: int = 0,
    k_hi: int | None = None,
    budget_limit: int | None = None,
) -> list[Representation]:
    """All (n, k) with n <= N, k_lo <= k_i <= k_hi and |Q(n) - sum c_i lam^k_i| <= B.

    k_hi defaults to floor(b0 (1 + log N)).  Tuples range over the full cube,
    which is the same as sorted exponents with every assignment of the c_i.
    Rational inputs are handled in exact arithmetic.
    """
    if N < 2:
        raise DomainError("N must be >= 2")
    if k_hi is None:
        k_hi = exponent_cap(inst, N)
    width = max(0, k_hi - k_lo + 1)
    budget.check(width**inst.m, budget_limit, "exponent tuples")
    exact = inst.exact and k_lo >= 0
    lam = Fraction(inst.lam) if exact else complex(inst.lam)
    powers = {k: lam**k for k in range(k_lo, k_hi + 1)}
    found = []
    for k in itertools.product(range(k_lo, k_hi + 1), repeat=inst.m):
        target = sum(ci * powers[ki] for ci, ki in zip(inst.c, k))
        for n in _candidates(inst, target, N):
            diff = abs(inst.Q(n) - target)
            ok = diff <= inst.B if exact else diff <= abs(inst.B) + 1e-9 * max(1.0, abs(target))
            if ok:
                found.append(Representation(n, k, float(diff)))
    found.sort(key=lambda r: (r.n, r.k))
    return found


def representable_n(reps: Sequence[Representation]) -> list[int]:
    return sorted({r.n for r in reps})


# --- the lacunary counterexample ------------------------------------------------


def b_sequence(count: int) -> list[int]:
    """b_2, b_3, ... with b_2 = 2 and b_{j+1} = 2^{b_j} + b_j + 1.

    Only four terms are representable: b_6 would have about 2^136 bits.
    """
    if count > 4:
        raise DomainError("b_6 and beyond are too large to materialize")
    seq = [2]
    while len(seq) < count:
        seq.append(2 ** seq[-1] + seq[-1] + 1)
    return seq


def _endpoints(x) -> tuple[Fraction, Fraction]:
    def frac(raw):
        sign, man, exp, _ = raw
        v = Fraction(int(man)) * (Fraction(2) ** exp)
        return -v if sign else v

    lo, hi = x._mpi_
    return frac(lo), frac(hi)


@dataclass(frozen=True)
class LacunaryState:
    b_seq: tuple[int, ...]
    precision_bits: int
    alpha_lo: Fraction
    alpha_hi: Fraction
    truncation_error: Fraction = field(repr=False)


def lacunary_state(precision_bits: int) -> LacunaryState:
    """alpha = sum_{j>=2} (j-1) / 2^{b_j}, summed through b_4 with a rigorous tail.

    The omitted terms j >= 5 are bounded by twice the j = 5 term, because
    each term is at most half the previous one.
    """
    seq = b_sequence(4)  # b_2..b_5
    head = sum(Fraction(j - 1, 2 ** seq[j - 2]) for j in (2, 3, 4))
    # tail < 8 / 2^{b_5}, and b_5 ~ 2^136 dwarfs any workable precision
    if seq[3] <= precision_bits + 3:
        raise DomainError("precision exceeds what the truncated alpha supports")
    tail_bound = Fraction(1, 2**precision_bits)
    return LacunaryState(tuple(seq), precision_bits, head, head + tail_bound, tail_bound)


@dataclass(frozen=True)
class LacunaryReport:
    n: int
    precision_bits: int
    deviation: float
    deviation_lo: Fraction
    deviation_hi: Fraction
    budget: Fraction
    passed: bool
    sandwich_ok: bool
    modulus_error_hi: float
    phase_error_hi: float
    component_budget: float
    routes_agree: bool

    @property
    def width(self) -> Fraction:
        return self.deviation_hi - self.deviation_lo

    def as_record(self) -> dict:
        return {
            "n": self.n,
            "precision_bits": self.precision_bits,
            "deviation": self.deviation,
            "budget": float(self.budget),
            "pass": self.passed,
        }


def _iv_from_fraction_bounds(lo: Fraction, hi_extra_exp: int | None, extra_coeff: int):
    """Interval [lo, lo + extra_coeff * 2^hi_extra_exp] with outward rounding."""
    lo_iv = iv.mpf(lo.numerator) / iv.mpf(lo.denominator)
    if hi_extra_exp is None:
        return lo_iv
    extra = ldexp(mpf(extra_coeff), hi_extra_exp)
    return iv.mpf([lo_iv.a, lo_iv.b + extra])


def _deviation(n, re, im):
    return iv.sqrt((iv.mpf(n) - re) ** 2 + im**2)


def lacunary_verify(n: int, precision_bits: int) -> LacunaryReport:
    """Check |n - (i/pi)(2^{2^{b_n}} - lam^{2^{b_n}})| <= n / b_{n+1} rigorously.

    Two routes are evaluated in interval arithmetic: the closed form
    (2^{1+2^{b_n}} sin(pi t_n) / pi) e^{pi i t_n}, and the definition of
    lam via alpha, reduced mod 1 after scaling by 2^{b_n}.  The enclosures
    must overlap.
    """
    if n not in (2, 3):
        raise DomainError("only n = 2, 3 are feasible (n = 4 needs ~2^136 bits)")
    if precision_bits < 512:
        raise DomainError("precision_bits must be >= 512")
    seq = b_sequence(n + 1)  # b_2 .. b_{n+2}
    bn, bn1, bn2 = seq[n - 2], seq[n - 1], seq[n]
    budget_val = Fraction(n, bn1)
    leading = Fraction(n, 2 ** (bn1 - bn))
    # tail of t_n: 0 < tail <= 2(n+1) 2^{-(b_{n+2} - b_n)}
    tail_exp = -(bn2 - bn)
    # sandwich: 0 < t_n - n 2^{-(b_{n+1}-b_n)} < 2^{-2^{b_{n+1}}}
    sandwich_ok = 2 * (n + 1) < 2 ** (bn1 + 1 - bn)

    saved = iv.prec
    iv.prec = precision_bits
    try:
        t = _iv_from_fraction_bounds(leading, tail_exp, 2 * (n + 1))
        big = iv.mpf(2) ** (2**bn)
        pi = iv.pi
        amp = 2 * big * iv.sin(pi * t) / pi
        re1, im1 = amp * iv.cos(pi * t), amp * iv.sin(pi * t)
        dev1 = _deviation(n, re1, im1)

        state = lacunary_state(precision_bits + 64)
        alpha = iv.mpf([iv.mpf(state.alpha_lo.numerator) / state.alpha_lo.denominator,
                        iv.mpf(state.alpha_hi.numerator) / state.alpha_hi.denominator])
        scaled = alpha * (2**bn)
        whole = sum((j - 1) * 2 ** (bn - seq[j - 2]) for j in range(2, n + 1))
        frac_part = scaled - whole
        # i/pi * big * (1 - e(2 frac)) = (big/pi) (sin(2 pi f) + i (1 - cos(2 pi f)))
        re2 = big / pi * iv.sin(2 * pi * frac_part)
        im2 = big / pi * (1 - iv.cos(2 * pi * frac_part))
        dev2 = _deviation(n, re2, im2)

        mod_err = abs(iv.mpf(n) - amp)
        phase_err = abs(1 - iv.cos(pi * t)) + abs(iv.sin(pi * t))
        lo1, hi1 = _endpoints(dev1)
        lo2, hi2 = _endpoints(dev2)
        mod_hi = float(_endpoints(mod_err)[1])
        phase_hi = float(_endpoints(phase_err)[1])
    finally:
        iv.prec = saved

    routes_agree = max(lo1, lo2) <= min(hi1, hi2)
    lo, hi = max(lo1, lo2), min(hi1, hi2)
    if not routes_agree:
        lo, hi = lo1, hi1
    if hi - lo > budget_val / 100:
        raise PrecisionInsufficient(f"enclosure width {float(hi - lo):.3e} exceeds 1% of the budget")
    return LacunaryReport(
        n=n,
        precision_bits=precision_bits,
        deviation=float((lo + hi) / 2),
        deviation_lo=lo,
        deviation_hi=hi,
        budget=budget_val,
        passed=hi <= budget_val,
        sandwich_ok=sandwich_ok,
        modulus_error_hi=mod_hi,
        phase_error_hi=phase_hi,
        component_budget=2.0**-bn,
        routes_agree=routes_agree,
    )
