import csv
import io
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heckedist.chebyshev import MeasureP, moment_closed_form, sample
from heckedist.equidist import (
    build_report,
    ks_statistic,
    moment_test,
    report_to_json,
    trace_ratio_prediction,
)
from heckedist.errors import DomainError
from heckedist.numtheory import is_prime, predicted_moment
from heckedist.spectra import EigenMultiset

from oracles import quad_cdf


def ms(values, p=2, N=11, k=2, label=""):
    return EigenMultiset(N, k, label, p, np.asarray(values, dtype=float))


def test_ks_single_atom_at_zero():
    for p in (2, 3, 11):
        assert ks_statistic(ms([0.0], p), p) == pytest.approx(0.5, abs=1e-10)


def test_ks_errors():
    with pytest.raises(DomainError):
        ks_statistic(ms([]), 2)
    with pytest.raises(DomainError):
        ks_statistic(ms([0.1], p=3), 2)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=300), st.sampled_from([2, 3, 5, 7]))
def test_ks_positive_and_bounded(values, p):
    ks = ks_statistic(ms(values, p), p)
    assert 0 < ks <= 1


def test_ks_matches_brute_force():
    vals = np.sort(sample(MeasureP(3), 40, 5))
    F = np.array([quad_cdf(3, float(v)) for v in vals])
    n = len(vals)
    brute = max(max((i + 1) / n - F[i], F[i] - i / n) for i in range(n))
    assert ks_statistic(ms(vals, 3), 3) == pytest.approx(brute, abs=1e-9)


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=100), st.sampled_from([2, 5, 13]))
def test_moment_zero_error_is_exactly_zero(values, p):
    assert moment_test(ms(values, p), 3).errors[0] == 0


def test_moment_degenerate_atom():
    for p in (2, 3, 7):
        d = moment_test(ms([2.0] * 5, p), 2)
        assert d.errors[2] == pytest.approx(abs(3 - 1 / p), abs=1e-15)
        assert d.predicted == [predicted_moment(n, p) for n in range(3)]


def test_moment_test_requires_nmax():
    with pytest.raises(DomainError):
        moment_test(ms([0.0]), 0)
    with pytest.raises(DomainError):
        moment_test(ms([]), 4)


def test_moment_test_synthetic():
    d = moment_test(ms(sample(MeasureP(2), 10_000, 20260103)), 10)
    assert d.max_abs_error <= 0.05
    assert d.max_abs_error >= 0


def test_trace_ratio_examples():
    assert trace_ratio_prediction(35, 5, 4, 3, 3)[0] == 0
    assert trace_ratio_prediction(35, 5, 4, 3, 2)[0] == Fraction(1, 3)
    assert trace_ratio_prediction(12, 3, 2, 5, 0) == (1, Fraction(1, 3), Fraction(1, 3))


def test_trace_ratio_errors():
    with pytest.raises(DomainError, match="dim"):
        trace_ratio_prediction(8, 4, 3, 3, 2)
    with pytest.raises(DomainError):
        trace_ratio_prediction(12, 3, 2, 3, 2)


@pytest.mark.parametrize("N, f, k", [(1, 1, 2), (35, 5, 4), (77, 7, 3), (16, 4, 2), (225, 15, 12)])
def test_two_routes_agree(N, f, k):
    for p in (q for q in range(2, 12) if is_prime(q) and N % q):
        for n in range(31):
            assert trace_ratio_prediction(N, f, k, p, n)[0] == moment_closed_form(n, p)


def family(p=2, seed0=20260101):
    return [ms(sample(MeasureP(p), size, seed0 + i), p, N=size + 1) for i, size in enumerate((100, 1000, 10_000))]


def test_build_report_synthetic_family():
    rep = build_report(list(reversed(family())), 2, 10, workers=3)
    assert [s.level for s in rep.family] == [101, 1001, 10001]
    assert rep.ks_strictly_decreasing
    assert rep.ks_last <= 0.03
    data = json.loads(report_to_json(rep))
    assert data["trend"]["ks_first"] == rep.ks_first
    assert len(data["family"][0]["moments"]) == 11


def test_build_report_parallel_is_deterministic():
    fam = family()
    assert report_to_json(build_report(fam, 2, workers=1)) == report_to_json(build_report(fam, 2, workers=4))


def test_build_report_orders_by_level_plus_weight():
    fam = [ms([0.1], N=20, k=2), ms([0.2], N=11, k=12), ms([0.3], N=9, k=4)]
    rep = build_report(fam, 2, 2)
    assert [(s.level, s.weight) for s in rep.family] == [(9, 4), (20, 2), (11, 12)]


def test_build_report_single_and_errors():
    assert len(build_report([ms([0.5])], 2, 2).family) == 1
    with pytest.raises(DomainError):
        build_report([ms([0.5]), ms([0.1], p=3)], 2)
    with pytest.raises(DomainError, match="N=13"):
        build_report([ms([0.5]), ms([], N=13)], 2)
    with pytest.raises(DomainError):
        build_report([], 2)


def test_incomplete_space_gets_ks_only():
    partial = EigenMultiset(11, 2, "", 2, np.array([0.1, 0.4]), complete=False)
    (s,) = build_report([partial], 2, 4).family
    assert s.moments is None and s.ks > 0


def test_report_csv():
    rep = build_report(family(), 2, 10)
    rows = list(csv.DictReader(io.StringIO(rep.moments_csv())))
    assert len(rows) == 3 * 11
    assert rows[4]["predicted_moment"] == "1/4"
    assert rows[0]["abs_error"] == "0"
    ks_rows = list(csv.DictReader(io.StringIO(rep.ks_csv())))
    assert [float(r["ks"]) for r in ks_rows] == [s.ks for s in rep.family]


@pytest.mark.parametrize("p", [2, 3])
def test_average_ks_over_seeds(p):
    ks = [ks_statistic(ms(sample(MeasureP(p), 10_000, 1000 + s), p), p) for s in range(20)]
    assert np.mean(ks) <= 0.02


def test_negative_control_is_detectable():
    # sup |F_2 - F_7| from the quadrature oracle bounds the mismatched KS from below
    grid = np.linspace(-2, 2, 401)
    gap = max(abs(quad_cdf(2, float(x)) - quad_cdf(7, float(x))) for x in grid)
    m = ms(sample(MeasureP(2), 10_000, 20260103), 2)
    own = ks_statistic(m, 2)
    wrong = ks_statistic(ms(m.values, 7), 7)
    assert wrong >= gap - own - 1e-9
    assert gap > 0.06
    assert wrong >= 0.05
