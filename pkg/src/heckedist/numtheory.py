"""Exact arithmetic for the newspace dimension main term.

All multiplicative functions here return :class:`fractions.Fraction` so that
the ``(k-1)/12`` scaling of the trace main term stays exact.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Union

from .errors import DomainError

MAX_INPUT = 2**63 - 1

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_TRIAL_LIMIT = 1 << 12
_SMALL_PRIMES = [
    q for q in range(2, _TRIAL_LIMIT) if all(q % d for d in range(2, math.isqrt(q) + 1))
]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
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
        if g != n:
            return g


def _split(n: int, out: dict, rng: random.Random) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n, rng)
    _split(d, out, rng)
    _split(n // d, out, rng)


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition ``n = prod(p**e for p, e in factors)``."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"factorization of non-positive integer {self.n}")
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1 or not is_prime(p):
                raise DomainError(f"invalid prime power ({p}, {e}) in factorization of {self.n}")
            last = p
            prod *= p**e
        if prod != self.n:
            raise DomainError(f"factors multiply to {prod}, not {self.n}")

    def __int__(self) -> int:
        return self.n

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def valuation(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def is_square(self) -> bool:
        return all(e % 2 == 0 for _, e in self.factors)

    def __truediv__(self, other: "Factorization") -> "Factorization":
        """Exact quotient; raises if ``other`` does not divide ``self``."""
        if self.n % other.n:
            raise DomainError(f"{other.n} does not divide {self.n}")
        exps = dict(self.factors)
        for p, e in other.factors:
            exps[p] -= e
        return Factorization(self.n // other.n, tuple((p, e) for p, e in sorted(exps.items()) if e))


IntLike = Union[int, Factorization]


def factorize(n: int) -> Factorization:
    if isinstance(n, bool) or not isinstance(n, int):
        raise DomainError(f"expected an integer, got {n!r}")
    if n < 1 or n > MAX_INPUT:
        raise DomainError(f"factorize requires 1 <= n <= 2**63-1, got {n}")
    out: dict[int, int] = {}
    m = n
    for q in _SMALL_PRIMES:
        if q * q > m:
            break
        if m % q == 0:
            e = 0
            while m % q == 0:
                m //= q
                e += 1
            out[q] = e
    if m > 1:
        # seeded so factorization is reproducible run to run
        _split(m, out, random.Random(m))
    return Factorization(n, tuple(sorted(out.items())))


def as_factorization(n: IntLike) -> Factorization:
    return n if isinstance(n, Factorization) else factorize(n)


def omega(n: IntLike) -> int:
    return len(as_factorization(n).factors)


def psi(n: IntLike) -> Fraction:
    """Multiplicative, with psi(p^r) = p^r (1 + 1/p)."""
    fac = as_factorization(n)
    return reduce(lambda acc, pe: acc * pe[0] ** pe[1] * (1 + Fraction(1, pe[0])), fac.factors, Fraction(1))


def _beta_local(p: int, r: int, p_divides_f: bool) -> Fraction:
    if p_divides_f:
        c = 1 - Fraction(2, p)
        if r >= 2:
            c += Fraction(1, p**2)
    else:
        c = 1 - Fraction(1, p)
        if r >= 2:
            c -= Fraction(1, p**2)
        if r >= 3:
            c += Fraction(1, p**3)
    return p**r * c


def beta_psi_f(n: IntLike, f: IntLike) -> Fraction:
    """The multiplicative function beta*psi_f evaluated at ``n``.

    The local factor at p^r depends on whether p divides the conductor ``f``.
    """
    fac = as_factorization(n)
    fprimes = set(as_factorization(f).primes())
    out = Fraction(1)
    for p, r in fac.factors:
        out *= _beta_local(p, r, p in fprimes)
    return out


def _check_divides(N: Factorization, f: Factorization) -> None:
    if N.n % f.n:
        raise DomainError(f"conductor {f.n} does not divide level {N.n}")


def psi_new(N: IntLike, f: IntLike) -> Fraction:
    """psi(f) * beta*psi_f(N/f), the main term of the newspace dimension."""
    N, f = as_factorization(N), as_factorization(f)
    _check_divides(N, f)
    return psi(f) * beta_psi_f(N / f, f)


def is_exceptional(N: IntLike, f: IntLike) -> bool:
    """True when 2 | f and 2 exactly divides N/f (the newspace is then zero)."""
    N, f = as_factorization(N), as_factorization(f)
    _check_divides(N, f)
    return f.n % 2 == 0 and (N / f).valuation(2) == 1


def main_term_trace(m: IntLike, N: IntLike, f: IntLike, k: int) -> Fraction:
    """Main term of the normalized trace of T_m on the newspace."""
    if k < 2:
        raise DomainError(f"weight must be >= 2, got {k}")
    m = as_factorization(m)
    value = Fraction(k - 1, 12) * psi_new(N, f)
    if not m.is_square():
        return Fraction(0)
    return value / math.isqrt(m.n)


def predicted_moment(n: int, p: int) -> Fraction:
    """Limit of the normalized X_n power-trace: p^(-n/2) for even n, else 0."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if n < 0:
        raise DomainError(f"moment index must be nonnegative, got {n}")
    if n % 2:
        return Fraction(0)
    return Fraction(1, p ** (n // 2))


def divisors(n: IntLike) -> list[int]:
    fac = as_factorization(n)
    out = [1]
    for p, e in fac.factors:
        out = [d * p**i for d in out for i in range(e + 1)]
    return sorted(out)
