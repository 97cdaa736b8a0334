"""Carry arithmetic for central binomial coefficients.

By Kummer's theorem the exponent of a prime p in C(2n,n) equals the number
of carries when n is added to itself in base p.  That count has a closed
form in base-p digit sums,

    nu_p(C(2n,n)) = (2*S_p(n) - S_p(2n)) / (p - 1),

which is what everything here is built on.  All operations are exact
integer arithmetic and pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

# n must satisfy 2n < 2^63 so the doubled value still fits a signed 64-bit
# word in the sieve's packed buffers.
MAX_N = 1 << 62


@dataclass(frozen=True)
class PrimePower:
    p: int
    a: int

    def __post_init__(self) -> None:
        if self.a < 1:
            raise ValueError(f"exponent must be >= 1, got {self.a}")
        if self.p < 2:
            raise ValueError(f"prime must be >= 2, got {self.p}")


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[PrimePower, ...]

    def __post_init__(self) -> None:
        prod = 1
        prev = 1
        for pp in self.factors:
            if pp.p <= prev:
                raise ValueError("primes must be strictly increasing")
            prev = pp.p
            prod *= pp.p**pp.a
        if prod != self.n:
            raise ValueError(f"factors multiply to {prod}, not {self.n}")
        if self.n == 1 and self.factors:
            raise ValueError("n = 1 must have an empty factor list")


@dataclass(frozen=True)
class CarryReport:
    n: int
    p: int
    carries: int


def factorize(n: int) -> Factorization:
    """Trial-division factorization; convenience for tests and small inputs."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    m = n
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            a = 0
            while m % d == 0:
                m //= d
                a += 1
            out.append(PrimePower(d, a))
        d += 1 if d == 2 else 2
    if m > 1:
        out.append(PrimePower(m, 1))
    return Factorization(n, tuple(out))


def digit_sum(n: int, p: int) -> int:
    """Sum of the base-p digits of n."""
    if p < 2:
        raise ValueError(f"base must be >= 2, got {p}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    s = 0
    while n:
        n, r = divmod(n, p)
        s += r
    return s


def carries(n: int, p: int) -> CarryReport:
    """Number of carries in the base-p addition n + n, i.e. nu_p(C(2n,n))."""
    if not 1 <= n < MAX_N:
        raise OverflowError(f"n out of supported range [1, 2^62): {n}")
    c = (2 * digit_sum(n, p) - digit_sum(2 * n, p)) // (p - 1)
    return CarryReport(n=n, p=p, carries=c)


def divides_power(f: Factorization, ell: int) -> bool:
    """True iff n^ell divides C(2n,n).

    Needs carries(n,p) >= ell*a for every p^a exactly dividing n; n = 1 is
    vacuously divisible.
    """
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    return all(carries(f.n, pp.p).carries >= ell * pp.a for pp in f.factors)


def is_coprime_cbc(f: Factorization) -> bool:
    """True iff gcd(n, C(2n,n)) = 1, i.e. no prime of n carries at all."""
    return all(carries(f.n, pp.p).carries == 0 for pp in f.factors)


def large_prime_filter(f: Factorization) -> bool:
    """Short-circuit: if the largest prime p of n has p^2 > 2n then no
    positive power of n divides C(2n,n); returns False when inconclusive.

    With p | n and 2n < p^2, n has base-p digits (n//p, 0) and 2(n//p) < p,
    so the addition n+n is carry-free at p and nu_p(C(2n,n)) = 0 while
    nu_p(n^ell) >= 1.
    """
    if f.n < 2:
        raise ValueError("filter requires n >= 2")
    p = f.factors[-1].p
    return p * p > 2 * f.n


def oracle_valuation(n: int, p: int) -> int:
    """Big-integer Legendre-formula valuation of C(2n,n); test oracle."""
    v = 0
    pk = p
    while pk <= 2 * n:
        v += (2 * n) // pk - 2 * (n // pk)
        pk *= p
    return v


def oracle_is_coprime(n: int) -> bool:
    """Literal gcd against a big-integer C(2n,n); test oracle, small n only."""
    from math import comb

    return gcd(n, comb(2 * n, n)) == 1
