"""Normalized eigenvalue multisets and their Chebyshev power sums.

Because T_{p^{n+1}} = T_p T_{p^n} - T_{p^{n-1}} matches the X_n recurrence,
the sum of X_n over the normalized T_p spectrum is the trace of the
normalized T_{p^n}; ``sum_Xn`` computes exactly that sum.
"""
from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

import numpy as np

from ._backend import kernels
from .characters import DirichletCharacter, RootOfUnity, evaluate, parity, principal_inv_sqrt, principal_sqrt
from .errors import DataIntegrityError, DomainError
from .numtheory import is_prime

log = logging.getLogger(__name__)

IM_TOL = 1e-8
EDGE_TOL = 1e-8
CROSSCHECK_TOL = 1e-8

Character = Union[DirichletCharacter, str, None]


def char_label(chi: Character) -> str:
    if isinstance(chi, DirichletCharacter):
        return chi.label
    return "" if chi is None else str(chi)


@dataclass(frozen=True)
class EigenRecord:
    """One newform's p-th coefficient, raw (``ap``) and/or normalized (``lam``)."""

    level: int
    weight: int
    character: Character
    p: int
    ap: Optional[complex] = None
    lam: Optional[float] = None
    field_degree: Optional[int] = None
    form_id: Optional[str] = None

    def __post_init__(self):
        if self.level < 1:
            raise DomainError(f"level must be positive, got {self.level}")
        if self.weight < 2:
            raise DomainError(f"weight must be >= 2, got {self.weight}")
        if not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")
        if math.gcd(self.p, self.level) != 1:
            raise DomainError(f"p divides N: p={self.p}, N={self.level}")
        if self.ap is None and self.lam is None:
            raise DomainError("record carries neither ap nor lambda")
        chi = self.character
        if isinstance(chi, DirichletCharacter):
            if chi.modulus != self.level:
                raise DomainError(f"character modulus {chi.modulus} differs from level {self.level}")
            if parity(chi) != (-1) ** self.weight:
                raise DomainError(f"chi(-1) = {parity(chi)} but (-1)^k = {(-1) ** self.weight}")
        elif chi is None and self.weight % 2:
            raise DomainError("trivial character needs even weight")
        if self.field_degree is not None and self.field_degree < 1:
            raise DomainError(f"field degree must be positive, got {self.field_degree}")

    @property
    def space(self) -> tuple[int, int, str, int]:
        return (self.level, self.weight, char_label(self.character), self.p)

    def chi_p(self) -> RootOfUnity:
        chi = self.character
        if chi is None:
            return RootOfUnity(0, 1)
        if not isinstance(chi, DirichletCharacter):
            raise DomainError(f"character label {chi!r} cannot be evaluated; supply lambda directly")
        return evaluate(chi, self.p)

    def value(self, im_tol: float = IM_TOL, edge_tol: float = EDGE_TOL) -> float:
        """Normalized eigenvalue; a given lambda wins but is cross-checked against ap."""
        if self.lam is None:
            return normalize(self, im_tol, edge_tol)
        lam = _clamp(self.lam, edge_tol)
        if self.ap is not None:
            other = normalize(self, im_tol, edge_tol)
            if abs(other - lam) > CROSSCHECK_TOL:
                raise DataIntegrityError(f"lambda={self.lam} disagrees with normalized ap={other}")
        return lam


def _clamp(x: float, edge_tol: float) -> float:
    if abs(x) > 2.0 + edge_tol:
        raise DataIntegrityError(
            f"|lambda| = {abs(x):.17g} exceeds 2: Ramanujan bound violated (corrupt data or branch mismatch)"
        )
    return min(2.0, max(-2.0, x))


def normalize(rec: EigenRecord, im_tol: float = IM_TOL, edge_tol: float = EDGE_TOL) -> float:
    """lambda = chi(p)^(-1/2) p^(-(k-1)/2) a_p, checked to be real and in [-2, 2]."""
    if rec.ap is None:
        raise DomainError("record has no raw ap")
    if math.gcd(rec.p, rec.level) != 1:
        raise DomainError(f"p divides N: p={rec.p}, N={rec.level}")
    return normalize_ap(complex(rec.ap), rec.chi_p(), rec.p, rec.weight, im_tol, edge_tol)


def normalize_ap(
    ap: complex, chi_p: RootOfUnity, p: int, k: int, im_tol: float = IM_TOL, edge_tol: float = EDGE_TOL
) -> float:
    z = ap * principal_inv_sqrt(chi_p) * p ** (-(k - 1) / 2)
    if abs(z.imag) > im_tol:
        raise DataIntegrityError(
            f"normalized eigenvalue has imaginary part {z.imag:.3e} > {im_tol:g}; "
            "check the chi(p)^(-1/2) branch convention"
        )
    return _clamp(z.real, edge_tol)


def denormalize(lam: float, chi_p: RootOfUnity, p: int, k: int) -> complex:
    """Raw a_p whose normalization is ``lam`` under this module's branch."""
    return lam * principal_sqrt(chi_p) * p ** ((k - 1) / 2)


@dataclass(frozen=True, eq=False)
class EigenMultiset:
    """Normalized T_p eigenvalues of one space S_k^new(N, chi).

    ``dimension`` overrides ``len(values)`` as the normalizer; ``complete``
    records whether the values exhaust the space.
    """

    level: int
    weight: int
    char_label: str
    p: int
    values: np.ndarray = field(default_factory=lambda: np.empty(0))
    complete: bool = True
    dimension: Optional[int] = None

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise DomainError("eigenvalues must be a flat sequence")
        if vals.size and np.max(np.abs(vals)) > 2.0:
            raise DomainError("eigenvalues must lie in [-2, 2]")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size

    @property
    def space(self) -> tuple[int, int, str, int]:
        return (self.level, self.weight, self.char_label, self.p)

    @property
    def normalizer(self) -> int:
        return self.dimension if self.dimension is not None else len(self)

    def describe(self) -> str:
        return f"(N={self.level}, k={self.weight}, chi={self.char_label or 'trivial'}, p={self.p})"


def multisets_from_records(
    records: Iterable[EigenRecord],
    complete: bool = True,
    im_tol: float = IM_TOL,
    edge_tol: float = EDGE_TOL,
) -> list[EigenMultiset]:
    groups: dict[tuple, list[float]] = defaultdict(list)
    for rec in records:
        groups[rec.space].append(rec.value(im_tol, edge_tol))
    return [
        EigenMultiset(N, k, lab, p, np.array(vals), complete=complete)
        for (N, k, lab, p), vals in sorted(groups.items())
    ]


def sum_Xn(ms: EigenMultiset, n: int) -> float:
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    return float(kernels.cheb_sum(ms.values, n))


def power_sums(ms: EigenMultiset, n_max: int) -> np.ndarray:
    """sum_Xn for every n in 0..n_max in one pass."""
    return kernels.cheb_power_sums(ms.values, n_max)


def _require_nonempty(ms: EigenMultiset) -> None:
    if ms.normalizer == 0:
        raise DomainError(
            f"empty eigenvalue multiset for {ms.describe()}: dim S_k^new(N, chi) = 0 "
            "(2 | f(chi) with 2 || N/f(chi) forces this)"
        )


def empirical_moment(ms: EigenMultiset, n: int) -> float:
    _require_nonempty(ms)
    return sum_Xn(ms, n) / ms.normalizer


@dataclass
class DegreeHistogram:
    counts: dict[int, int]
    proportions: dict[int, Fraction]
    total: int
    skipped: int = 0


def degree_histogram(records: Iterable[EigenRecord], r_max: int) -> dict[tuple, DegreeHistogram]:
    """Counts s(N,k,chi)_r of newforms with coefficient-field degree r <= r_max.

    Proportions divide by the number of newforms in the space, skipped
    records (no degree) included.
    """
    by_space: dict[tuple, list[EigenRecord]] = defaultdict(list)
    for rec in records:
        by_space[rec.space[:3]].append(rec)
    out = {}
    skipped_total = 0
    for space, recs in sorted(by_space.items()):
        # one form may appear once per prime p
        seen: dict = {}
        for i, rec in enumerate(recs):
            seen.setdefault(rec.form_id if rec.form_id is not None else i, rec)
        recs = list(seen.values())
        counts: dict[int, int] = {}
        skipped = 0
        for rec in recs:
            if rec.field_degree is None:
                skipped += 1
            elif rec.field_degree <= r_max:
                counts[rec.field_degree] = counts.get(rec.field_degree, 0) + 1
        counts = dict(sorted(counts.items()))
        total = len(recs)
        out[space] = DegreeHistogram(
            counts, {r: Fraction(c, total) for r, c in counts.items()}, total, skipped
        )
        skipped_total += skipped
    if skipped_total:
        log.warning("degree_histogram: skipped %d records without field_degree", skipped_total)
    return out
