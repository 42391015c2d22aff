"""Integer helpers: trial-division factorization, primality, lcm."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable


def factorize(m: int) -> dict[int, int]:
    """Return the prime factorization of ``m`` as ``{prime: exponent}``.

    ``factorize(1)`` is the empty dict. Deterministic trial division; the
    cofactor shrinks as small primes are divided out, so smooth numbers of
    any size factor quickly.
    """
    if not isinstance(m, int) or isinstance(m, bool):
        raise TypeError(f"expected int, got {type(m).__name__}")
    if m < 1:
        raise ValueError(f"cannot factorize {m}: need m >= 1")
    factors: dict[int, int] = {}
    for p in (2, 3):
        while m % p == 0:
            factors[p] = factors.get(p, 0) + 1
            m //= p
    p = 5
    while p * p <= m:
        for q in (p, p + 2):
            while m % q == 0:
                factors[q] = factors.get(q, 0) + 1
                m //= q
        p += 6
    if m > 1:
        factors[m] = factors.get(m, 0) + 1
    return dict(sorted(factors.items()))


def expand(factors: dict[int, int]) -> int:
    out = 1
    for p, e in factors.items():
        out *= p**e
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def lcm_all(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


def valuation(x: Fraction | int, p: int) -> int:
    """Exponent of prime ``p`` in the rational ``x`` (negative for denominators)."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero is undefined")
    num, den = x.numerator, x.denominator
    e = 0
    while num % p == 0:
        num //= p
        e += 1
    while den % p == 0:
        den //= p
        e -= 1
    return e


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)
