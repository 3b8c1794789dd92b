"""Self-check suite behind ``heckedist check``.

Each check returns ``(ok, detail)``. ``full=True`` uses the exhaustive ranges
of the acceptance tests; the default keeps the run to a few seconds.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np

from .characters import all_characters, conductor, evaluate, parity, ONE
from .chebyshev import MU_INF, MeasureP, cheb_coeffs, cheb_eval, even_part_identity_check, integrate, moment_closed_form, sample
from .equidist import build_report, ks_statistic, moment_test, trace_ratio_prediction
from .numtheory import divisors, is_exceptional, omega, psi_new
from .spectra import EigenMultiset, sum_Xn

PRIMES = (2, 3, 5, 7, 11)


def check_moment_identity(full: bool = False):
    worst = max(
        abs(integrate(lambda x, n=n: cheb_eval(n, x), MeasureP(p)) - float(moment_closed_form(n, p)))
        for n in range(21)
        for p in PRIMES
    )
    return worst <= 1e-10, f"max |quadrature - closed form| = {worst:.3e}"


def check_orthonormality(full: bool = False):
    top = 21 if full else 11
    worst = max(
        abs(integrate(lambda x, n=n, k=k: cheb_eval(n, x) * cheb_eval(k, x), MU_INF) - (n == k))
        for n in range(top)
        for k in range(top)
    )
    return worst <= 1e-10, f"max orthonormality defect = {worst:.3e}"


def check_even_part(full: bool = False):
    grid = np.linspace(-1.9, 1.9, 101)
    worst = max(even_part_identity_check(p, float(x), 60) for p in (2, 3, 5) for x in grid)
    return worst <= 1e-8, f"max truncation defect at K=60 = {worst:.3e}"


def psi_bound_violations(n_max: int) -> tuple[int, int]:
    """(lower-bound violations, vanishing-characterization mismatches) for N <= n_max."""
    bound = vanish = 0
    for N in range(1, n_max + 1):
        floor = Fraction(N, 4 ** omega(N))
        for f in divisors(N):
            value = psi_new(N, f)
            exc = is_exceptional(N, f)
            if not exc and value < floor:
                bound += 1
            if (value == 0) != exc:
                vanish += 1
    return bound, vanish


def check_psi_bound(full: bool = False):
    bound, vanish = psi_bound_violations(5000 if full else 500)
    return bound == 0 and vanish == 0, f"{bound} bound violations, {vanish} vanishing mismatches"


def _exact_poly_sum(coeffs, values) -> Fraction:
    """Exact sum of a monomial-form polynomial over float (dyadic) points.

    Float monomial evaluation cancels catastrophically at n ~ 30, so the
    second route has to be exact to be a meaningful reference.
    """
    total = Fraction(0)
    for v in values:
        m, d = float(v).as_integer_ratio()
        acc, dp = 0, 1
        for c in reversed(coeffs):
            acc = acc * m + c * dp
            dp *= d
        total += Fraction(acc, d ** (len(coeffs) - 1))
    return total


def check_recurrence(full: bool = False):
    rng = np.random.default_rng(0)
    worst = 0.0
    for n in range(31):
        vals = rng.uniform(-2, 2, 10_000 if full else 1000)
        direct = _exact_poly_sum(cheb_coeffs(n).coeffs, vals)
        got = sum_Xn(EigenMultiset(1, 2, "", 2, vals), n)
        worst = max(worst, float(abs(Fraction(got) - direct) / max(1, abs(direct))))
    return worst <= 1e-12, f"max relative error = {worst:.3e}"


def check_two_routes(full: bool = False):
    bad = [
        (n, p)
        for n in range(31)
        for p in (2, 3, 5, 7, 11)
        if trace_ratio_prediction(1, 1, 2, p, n)[0] != moment_closed_form(n, p)
    ]
    return not bad, f"{len(bad)} disagreements"


def check_synthetic(full: bool = False):
    family = [
        EigenMultiset(size + 1, 2, "", 2, sample(MeasureP(2), size, seed=20260101 + i))
        for i, size in enumerate((100, 1000, 10_000))
    ]
    report = build_report(family, 2, 10)
    ok = report.ks_strictly_decreasing and report.ks_last <= 0.03
    ok = ok and report.family[-1].moments.max_abs_error <= 0.05
    negative = ks_statistic(EigenMultiset(10_001, 2, "", 7, family[-1].values), 7)
    ok = ok and negative >= 0.05
    ks = ", ".join(f"{s.ks:.4f}" for s in report.family)
    return ok, f"KS {ks}; moment err {report.family[-1].moments.max_abs_error:.4f}; vs mu_7 {negative:.4f}"


def check_characters(full: bool = False):
    bad = 0
    for N in range(1, (201 if full else 61)):
        units = [a for a in range(1, N + 1) if math.gcd(a, N) == 1]
        for chi in all_characters(N):
            f_brute = next(
                d
                for d in divisors(N)
                if all(evaluate(chi, a) == ONE for a in units if (a - 1) % d == 0)
            )
            sign = 1 if evaluate(chi, N - 1) == ONE else -1
            if conductor(chi) != f_brute or parity(chi) != sign:
                bad += 1
    return bad == 0, f"{bad} characters disagree with the brute-force oracle"


CHECKS: dict[str, Callable] = {
    "moment-identity": check_moment_identity,
    "orthonormality": check_orthonormality,
    "even-part-identity": check_even_part,
    "psi-lower-bound": check_psi_bound,
    "recurrence-oracle": check_recurrence,
    "two-route-prediction": check_two_routes,
    "synthetic-equidistribution": check_synthetic,
    "characters": check_characters,
}


def run_checks(full: bool = False):
    for name, fn in CHECKS.items():
        ok, detail = fn(full)
        yield name, ok, detail
