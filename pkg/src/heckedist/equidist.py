"""Finite-family diagnostics for mu_p-equidistribution of normalized spectra.

Two views of the same question: Kolmogorov-Smirnov distance to mu_p, and the
errors of the X_n moments against their limits 1_{2|n} p^(-n/2). Polynomial
moments of every degree determine the limit, so checking X_0..X_{n_max}
is the operational form of the criterion.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ._backend import kernels
from .characters import BRANCH_CONVENTION
from .chebyshev import CDF_TOL, MeasureP, cdf
from .errors import DomainError
from .numtheory import Factorization, is_exceptional, main_term_trace, predicted_moment
from .spectra import EigenMultiset, _require_nonempty, power_sums

DEFAULT_NMAX = 10


def ks_statistic(ms: EigenMultiset, p: int, tol: float = CDF_TOL) -> float:
    """sup |F_emp - F_mu_p| via max(i/n - F(x_i), F(x_i) - (i-1)/n)."""
    if len(ms) == 0:
        raise DomainError(f"KS statistic of empty multiset {ms.describe()}")
    if ms.p != p:
        raise DomainError(f"multiset is for p={ms.p}, tested against mu_{p}")
    F = cdf(MeasureP(p), np.sort(ms.values), tol)
    return float(kernels.ks_from_cdf(np.ascontiguousarray(F)))


@dataclass
class MomentDiagnostic:
    n_max: int
    empirical: list[float]
    predicted: list[Fraction]
    errors: list[float] = field(init=False)

    def __post_init__(self):
        self.errors = [abs(e - float(q)) for e, q in zip(self.empirical, self.predicted)]

    @property
    def max_abs_error(self) -> float:
        return max(self.errors)


def moment_test(ms: EigenMultiset, n_max: int = DEFAULT_NMAX) -> MomentDiagnostic:
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    _require_nonempty(ms)
    sums = power_sums(ms, n_max)
    empirical = [float(s) / ms.normalizer for s in sums]
    if ms.dimension is None:
        empirical[0] = 1.0  # count / count, exactly
    predicted = [predicted_moment(n, ms.p) for n in range(n_max + 1)]
    return MomentDiagnostic(n_max, empirical, predicted)


def trace_ratio_prediction(N: int, f: int, k: int, p: int, n: int) -> tuple[Fraction, Fraction, Fraction]:
    """Predicted limit of Tr T_{p^n} / Tr T_1 together with both main terms.

    The limit is computed as the ratio of the two trace main terms, which
    makes it an independent route to 1_{2|n} p^(-n/2).
    """
    if N % p == 0:
        raise DomainError(f"p={p} divides N={N}")
    if is_exceptional(N, f):
        raise DomainError(
            f"N={N}, f={f}: 2 | f and 2 || N/f, so dim S_k^new(N, chi) = 0 and no eigenvalues exist"
        )
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    # p^n is built directly; it can exceed the factorization input cap
    numerator = main_term_trace(Factorization(p**n, ((p, n),) if n else ()), N, f, k)
    denominator = main_term_trace(1, N, f, k)
    return numerator / denominator, numerator, denominator


@dataclass
class SpaceReport:
    level: int
    weight: int
    char_label: str
    p: int
    dimension: int
    complete: bool
    ks: float
    moments: Optional[MomentDiagnostic]


@dataclass
class EquidistReport:
    p: int
    n_max: int
    family: list[SpaceReport]
    ks_tol: float = CDF_TOL
    branch: str = BRANCH_CONVENTION

    @property
    def ks_first(self) -> float:
        return self.family[0].ks

    @property
    def ks_last(self) -> float:
        return self.family[-1].ks

    @property
    def ks_strictly_decreasing(self) -> bool:
        ks = [s.ks for s in self.family]
        return all(a > b for a, b in zip(ks, ks[1:]))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n_max": self.n_max,
            "branch_convention": self.branch,
            "tolerances": {"cdf": self.ks_tol},
            "trend": {
                "ks_first": self.ks_first,
                "ks_last": self.ks_last,
                "ks_strictly_decreasing": self.ks_strictly_decreasing,
            },
            "family": [
                {
                    "N": s.level,
                    "k": s.weight,
                    "char_label": s.char_label,
                    "dimension": s.dimension,
                    "complete": s.complete,
                    "ks": s.ks,
                    "moments": None
                    if s.moments is None
                    else [
                        {
                            "n": n,
                            "empirical": e,
                            "predicted": _frac_str(q),
                            "abs_error": err,
                        }
                        for n, (e, q, err) in enumerate(zip(s.moments.empirical, s.moments.predicted, s.moments.errors))
                    ],
                    "max_abs_error": None if s.moments is None else s.moments.max_abs_error,
                }
                for s in self.family
            ],
        }

    def moments_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "k", "char_label", "p", "n", "empirical_moment", "predicted_moment", "abs_error"])
        for s in self.family:
            if s.moments is None:
                continue
            for n, (e, q, err) in enumerate(zip(s.moments.empirical, s.moments.predicted, s.moments.errors)):
                w.writerow([s.level, s.weight, s.char_label, s.p, n, f"{e:.17g}", _frac_str(q), f"{err:.17g}"])
        return buf.getvalue()

    def ks_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "k", "char_label", "p", "dimension", "ks"])
        for s in self.family:
            w.writerow([s.level, s.weight, s.char_label, s.p, s.dimension, f"{s.ks:.17g}"])
        return buf.getvalue()


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _space_report(ms: EigenMultiset, p: int, n_max: int, tol: float) -> SpaceReport:
    # incomplete spaces without a known dimension get KS only
    moments = moment_test(ms, n_max) if (ms.complete or ms.dimension is not None) else None
    return SpaceReport(
        ms.level, ms.weight, ms.char_label, ms.p, ms.normalizer, ms.complete, ks_statistic(ms, p, tol), moments
    )


def build_report(
    family: Sequence[EigenMultiset],
    p: int,
    n_max: int = DEFAULT_NMAX,
    tol: float = CDF_TOL,
    workers: int = 1,
) -> EquidistReport:
    """Diagnostics for each space, ordered by N + k."""
    if not family:
        raise DomainError("empty family")
    for ms in family:
        if ms.p != p:
            raise DomainError(f"mixed primes: {ms.describe()} in a report for p={p}")
        if len(ms) == 0:
            raise DomainError(f"empty multiset {ms.describe()}: dim S_k^new(N, chi) = 0")
    ordered = sorted(family, key=lambda ms: (ms.level + ms.weight, ms.level, ms.char_label))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            spaces = list(pool.map(lambda ms: _space_report(ms, p, n_max, tol), ordered))
    else:
        spaces = [_space_report(ms, p, n_max, tol) for ms in ordered]
    return EquidistReport(p, n_max, spaces, tol)


def report_to_json(report: EquidistReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True)


__all__ = [
    "MomentDiagnostic",
    "EquidistReport",
    "SpaceReport",
    "ks_statistic",
    "moment_test",
    "trace_ratio_prediction",
    "build_report",
    "report_to_json",
]
