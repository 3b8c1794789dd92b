"""Dirichlet characters with exact root-of-unity values.

A character mod N is stored by its images on a fixed generating set of
(Z/N)^*, built prime power by prime power and lifted with the CRT.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

from .errors import DomainError
from .numtheory import factorize

BRANCH_CONVENTION = "chi(p) = exp(2*pi*i*t), t in [0,1); chi(p)^(-1/2) = exp(-pi*i*t)"


@dataclass(frozen=True, order=True)
class RootOfUnity:
    """exp(2 pi i a/m), kept with 0 <= a < m in lowest terms."""

    a: int
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"root of unity order must be positive, got {self.m}")
        a = self.a % self.m
        g = math.gcd(a, self.m)
        object.__setattr__(self, "a", a // g)
        object.__setattr__(self, "m", self.m // g)

    @classmethod
    def from_turns(cls, t: Fraction) -> "RootOfUnity":
        t = Fraction(t)
        return cls(t.numerator, t.denominator)

    @property
    def turns(self) -> Fraction:
        return Fraction(self.a, self.m)

    @property
    def order(self) -> int:
        return self.m

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        return RootOfUnity.from_turns(self.turns + other.turns)

    def __pow__(self, e: int) -> "RootOfUnity":
        return RootOfUnity.from_turns(self.turns * e)

    def __complex__(self) -> complex:
        # exact on the axes so that +-1, +-i compare cleanly
        quarter = self.turns * 4
        if quarter.denominator == 1:
            return (1 + 0j, 1j, -1 + 0j, -1j)[int(quarter) % 4]
        return cmath.exp(2j * math.pi * self.a / self.m)

    def __repr__(self):
        return f"RootOfUnity({self.a}/{self.m})"


ONE = RootOfUnity(0, 1)
MINUS_ONE = RootOfUnity(1, 2)


def _primitive_root(q: int, pe: int) -> int:
    """Smallest generator of the cyclic group (Z/q^e)^*, q an odd prime."""
    phi = pe // q * (q - 1)
    small = [r for r, _ in factorize(phi).factors]
    for g in range(2, pe):
        if math.gcd(g, q) == 1 and all(pow(g, phi // r, pe) != 1 for r in small):
            return g
    raise AssertionError("unreachable: odd prime powers have primitive roots")


@lru_cache(maxsize=None)
def _local_structure(q: int, e: int) -> tuple[tuple[int, int], ...]:
    pe = q**e
    if q == 2:
        if e == 1:
            return ()
        if e == 2:
            return ((3, 2),)
        return ((pe - 1, 2), (3, pe // 4))
    return ((_primitive_root(q, pe), pe // q * (q - 1)),)


def _crt_lift(residue: int, pe: int, N: int) -> int:
    """x with x = residue mod pe and x = 1 mod N/pe."""
    rest = N // pe
    if rest == 1:
        return residue % N
    # x = 1 + rest*t, solve rest*t = residue - 1 mod pe
    t = (residue - 1) * pow(rest, -1, pe) % pe
    return (1 + rest * t) % N


@lru_cache(maxsize=None)
def _structure(N: int):
    gens = []
    locals_ = []
    for q, e in factorize(N).factors:
        pe = q**e
        loc = _local_structure(q, e)
        locals_.append((q, e, pe, len(gens), loc))
        for g, o in loc:
            gens.append((_crt_lift(g, pe, N), o))
    return tuple(gens), tuple(locals_)


def unit_group_structure(N: int) -> list[tuple[int, int]]:
    """Generators of (Z/N)^* as ``(generator, order)`` pairs.

    Odd prime powers contribute their smallest primitive root; 2^e with e >= 3
    contributes -1 and 3. Each generator is 1 modulo the other prime powers.
    """
    if N < 1:
        raise DomainError(f"modulus must be positive, got {N}")
    return list(_structure(N)[0])


@lru_cache(maxsize=256)
def _local_dlog(q: int, e: int) -> dict[int, tuple[int, ...]]:
    """Table residue mod q^e -> exponent vector on the local generators."""
    pe = q**e
    loc = _local_structure(q, e)
    table: dict[int, tuple[int, ...]] = {}
    ranges = [range(o) for _, o in loc]
    for exps in itertools.product(*ranges):
        x = 1
        for (g, _), k in zip(loc, exps):
            x = x * pow(g, k, pe) % pe
        table[x] = exps
    return table


def discrete_log(N: int, a: int) -> tuple[int, ...]:
    """Exponents of the unit ``a`` on ``unit_group_structure(N)``."""
    if math.gcd(a, N) != 1:
        raise DomainError(f"{a} is not a unit modulo {N}")
    _, locals_ = _structure(N)
    out: list[int] = []
    for q, e, pe, _, _ in locals_:
        out.extend(_local_dlog(q, e)[a % pe])
    return tuple(out)


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: int
    images: tuple[RootOfUnity, ...]

    def __post_init__(self):
        gens = unit_group_structure(self.modulus)
        if len(gens) != len(self.images):
            raise DomainError(
                f"character mod {self.modulus} needs {len(gens)} generator images, got {len(self.images)}"
            )
        for (g, o), z in zip(gens, self.images):
            if o % z.m:
                raise DomainError(f"image {z} of generator {g} has order not dividing {o}")

    @classmethod
    def trivial(cls, N: int) -> "DirichletCharacter":
        return cls(N, tuple(ONE for _ in unit_group_structure(N)))

    @property
    def generators(self) -> list[tuple[int, int]]:
        return unit_group_structure(self.modulus)

    def __call__(self, a: int):
        return evaluate(self, a)

    @property
    def label(self) -> str:
        return f"{self.modulus}:" + ",".join(f"{z.a}/{z.m}" for z in self.images)

    def is_trivial(self) -> bool:
        return all(z == ONE for z in self.images)

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "images": [[g, z.a, z.m] for (g, _), z in zip(self.generators, self.images)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DirichletCharacter":
        try:
            N = int(obj["modulus"])
            raw = obj["images"]
            gens = unit_group_structure(N)
            if len(raw) != len(gens):
                raise DomainError(f"character mod {N} needs {len(gens)} images, got {len(raw)}")
            images = []
            for (g, _), (g2, a, m) in zip(gens, raw):
                if int(g2) != g:
                    raise DomainError(f"generator {g2} does not match canonical generator {g} mod {N}")
                images.append(RootOfUnity(int(a), int(m)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"malformed character object {obj!r}") from exc
        return cls(N, tuple(images))


Value = Union[RootOfUnity, int]


def evaluate(chi: DirichletCharacter, a: int) -> Value:
    """chi(a) as a RootOfUnity, or the integer 0 when gcd(a, N) > 1."""
    N = chi.modulus
    a %= N
    if math.gcd(a, N) != 1:
        return 0
    M = _exponent(N)
    num = sum(z.a * (M // z.m) * k for z, k in zip(chi.images, discrete_log(N, a)))
    return RootOfUnity(num, M)


@lru_cache(maxsize=None)
def _exponent(N: int) -> int:
    """lcm of the generator orders; every character value is an M-th root of unity."""
    M = 1
    for _, o in unit_group_structure(N):
        M = M * o // math.gcd(M, o)
    return M


def conductor(chi: DirichletCharacter) -> int:
    """Smallest f | N through which chi factors.

    Computed locally: at each prime power q^e the subgroup of units that are
    1 mod q^c is cyclic, generated by 1 + q^c (c >= 1, or c >= 2 for q = 2).
    """
    N = chi.modulus
    _, locals_ = _structure(N)
    f = 1
    for q, e, pe, start, loc in locals_:
        imgs = chi.images[start : start + len(loc)]
        if all(z == ONE for z in imgs):
            continue
        c = 2 if q == 2 else 1
        while c < e and evaluate(chi, _crt_lift(1 + q**c, pe, N)) != ONE:
            c += 1
        f *= q**c
    return f


def parity(chi: DirichletCharacter) -> int:
    v = evaluate(chi, -1)
    return 1 if v == ONE else -1


def all_characters(N: int) -> Iterator[DirichletCharacter]:
    gens = unit_group_structure(N)
    for ks in itertools.product(*(range(o) for _, o in gens)):
        yield DirichletCharacter(N, tuple(RootOfUnity(k, o) for k, (_, o) in zip(ks, gens)))


def principal_inv_sqrt(z: Value) -> complex:
    """chi(p)^(-1/2) on the fixed branch exp(-pi i t) for z = exp(2 pi i t).

    t = 1/2 (z = -1) therefore maps to -i.
    """
    if not isinstance(z, RootOfUnity):
        raise DomainError("chi(p) = 0: p divides the modulus")
    return complex(RootOfUnity(-z.a, 2 * z.m))


def principal_sqrt(z: Value) -> complex:
    """Inverse of :func:`principal_inv_sqrt`, exp(pi i t)."""
    if not isinstance(z, RootOfUnity):
        raise DomainError("chi(p) = 0: p divides the modulus")
    return complex(RootOfUnity(z.a, 2 * z.m))
