import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heckedist.characters import DirichletCharacter, RootOfUnity, all_characters, evaluate, parity
from heckedist.chebyshev import cheb_coeffs, cheb_eval
from heckedist.errors import DataIntegrityError, DomainError
from heckedist.numtheory import is_prime
from heckedist.spectra import (
    EigenMultiset,
    EigenRecord,
    degree_histogram,
    denormalize,
    empirical_moment,
    multisets_from_records,
    normalize,
    normalize_ap,
    power_sums,
    sum_Xn,
)

from oracles import exact_cheb_sum

CHI5_I = DirichletCharacter(5, (RootOfUnity(1, 4),))  # chi(2) = i, odd


def ms(values, p=2):
    return EigenMultiset(11, 2, "", p, np.asarray(values, dtype=float))


def test_normalize_examples():
    assert normalize(EigenRecord(11, 2, None, 3, ap=0j)) == 0
    k, p = 4, 3
    assert normalize(EigenRecord(10, k, None, p, ap=2 * p ** ((k - 1) / 2) + 0j)) == 2
    rec = EigenRecord(5, 3, CHI5_I, 2, ap=(1 + 1j) * 2 ** 1.0)
    assert evaluate(CHI5_I, 2) == RootOfUnity(1, 4)
    assert normalize(rec) == pytest.approx(math.sqrt(2), abs=1e-15)


def test_normalize_errors():
    with pytest.raises(DomainError, match="p divides N"):
        EigenRecord(10, 2, None, 5, ap=1 + 0j)
    with pytest.raises(DataIntegrityError, match="imaginary"):
        normalize(EigenRecord(11, 2, None, 3, ap=1 + 0.5j))
    with pytest.raises(DataIntegrityError, match="Ramanujan"):
        normalize(EigenRecord(11, 2, None, 3, ap=2.1 * 3**0.5 + 0j))


def test_normalize_clamps_within_edge_tol():
    rec = EigenRecord(11, 2, None, 3, ap=(2 + 5e-9) * 3**0.5 + 0j)
    assert normalize(rec) == 2.0


def test_wrong_branch_is_detected():
    # a_p built with chi(p)^(-1/2) instead of chi(p)^(1/2) leaves an imaginary part
    lam = 1.2
    wrong = lam * complex(RootOfUnity(-1, 8)) * 2.0
    with pytest.raises(DataIntegrityError):
        normalize(EigenRecord(5, 3, CHI5_I, 2, ap=wrong))


def test_record_invariants():
    with pytest.raises(DomainError):
        EigenRecord(5, 2, CHI5_I, 2, lam=0.1)  # odd character, even weight
    with pytest.raises(DomainError):
        EigenRecord(11, 3, None, 2, lam=0.1)
    with pytest.raises(DomainError):
        EigenRecord(11, 2, None, 4, lam=0.1)
    with pytest.raises(DomainError):
        EigenRecord(11, 2, None, 2)
    with pytest.raises(DomainError):
        EigenRecord(7, 3, CHI5_I, 2, lam=0.1)


def test_lambda_wins_and_is_crosschecked():
    ap = denormalize(0.5, RootOfUnity(1, 4), 2, 3)
    assert EigenRecord(5, 3, CHI5_I, 2, ap=ap, lam=0.5).value() == 0.5
    with pytest.raises(DataIntegrityError):
        EigenRecord(5, 3, CHI5_I, 2, ap=ap, lam=0.6).value()


primes = st.sampled_from([q for q in range(2, 200) if is_prime(q)])


@settings(max_examples=500)
@given(
    st.floats(-2, 2),
    st.integers(1, 60).flatmap(lambda m: st.tuples(st.integers(0, m - 1), st.just(m))),
    primes,
    st.integers(2, 50),
)
def test_normalize_denormalize_roundtrip(lam, am, p, k):
    z = RootOfUnity(*am)
    assert abs(normalize_ap(denormalize(lam, z, p, k), z, p, k) - lam) <= 1e-10


@pytest.mark.parametrize("N", [3, 5, 7, 8, 12, 13, 15, 21, 24])
def test_roundtrip_through_real_characters(N):
    rng = np.random.default_rng(N)
    for chi in all_characters(N):
        k = 2 if parity(chi) == 1 else 3
        for p in (q for q in range(2, 40) if is_prime(q) and N % q):
            lam = float(rng.uniform(-2, 2))
            rec = EigenRecord(N, k, chi, p, ap=denormalize(lam, evaluate(chi, p), p, k))
            assert abs(normalize(rec) - lam) <= 1e-10


def test_sum_Xn_examples():
    assert sum_Xn(ms([2.0]), 1) == 2
    assert sum_Xn(ms([0.0, 0.0]), 2) == -2
    vals = np.random.default_rng(3).uniform(-2, 2, 100)
    assert abs(sum_Xn(ms(vals), 6) - sum(cheb_eval(6, float(v)) for v in vals)) <= 1e-12
    assert sum_Xn(ms([]), 4) == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 30), st.integers(1, 2000), st.integers(0, 2**32 - 1))
def test_sum_Xn_matches_exact_oracle(n, size, seed):
    vals = np.random.default_rng(seed).uniform(-2, 2, size)
    exact = exact_cheb_sum(cheb_coeffs(n).coeffs, vals)
    got = sum_Xn(ms(vals), n)
    assert abs(Fraction(got) - exact) <= Fraction(1, 10**12) * max(abs(exact), 1)


def test_power_sums_match_sum_Xn():
    m = ms(np.random.default_rng(1).uniform(-2, 2, 300))
    sums = power_sums(m, 12)
    for n in range(13):
        assert sums[n] == pytest.approx(sum_Xn(m, n), abs=1e-11)


def test_empirical_moment_examples():
    assert empirical_moment(ms([0.0]), 0) == 1
    assert empirical_moment(ms([1.0, -1.0]), 1) == 0
    lam = 0.8
    assert empirical_moment(ms([lam]), 2) == pytest.approx(lam * lam - 1, abs=1e-15)


def test_empirical_moment_empty_cites_exceptional_case():
    with pytest.raises(DomainError, match="dim S_k\\^new"):
        empirical_moment(ms([]), 2)


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=200))
def test_zeroth_moment_is_one(values):
    assert empirical_moment(ms(values), 0) == 1


def test_dimension_overrides_count():
    m = EigenMultiset(11, 2, "", 2, np.array([0.0, 0.0]), complete=False, dimension=4)
    assert empirical_moment(m, 0) == 0.5


def test_multiset_rejects_out_of_range():
    with pytest.raises(DomainError):
        ms([2.5])


def rec(N, degree, form_id=None, k=2):
    return EigenRecord(N, k, None, 3 if N % 3 else 5, lam=0.0, field_degree=degree, form_id=form_id)


def test_degree_histogram_examples():
    assert degree_histogram([], 3) == {}
    (h,) = degree_histogram([rec(11, 1), rec(11, 1)], 3).values()
    assert h.counts == {1: 2} and h.proportions == {1: 1}
    (h,) = degree_histogram([rec(11, d) for d in (1, 2, 2, 5)], 2).values()
    assert h.counts == {1: 1, 2: 2}
    assert h.proportions == {1: Fraction(1, 4), 2: Fraction(1, 2)}


def test_degree_histogram_skips_missing(caplog):
    (h,) = degree_histogram([rec(11, 1), rec(11, None), rec(11, 3)], 5).values()
    assert h.skipped == 1 and h.counts == {1: 1, 3: 1}
    assert sum(h.proportions.values()) < 1
    assert "skipped 1" in caplog.text


def test_degree_histogram_groups_spaces_and_dedupes_forms():
    recs = [rec(11, 1, "a"), rec(11, 1, "a"), rec(13, 2, "b"), rec(13, 2, "c")]
    hist = degree_histogram(recs, 4)
    assert hist[(11, 2, "")].counts == {1: 1}
    assert hist[(13, 2, "")].counts == {2: 2}
    for h in hist.values():
        assert sum(h.proportions.values()) == 1


def test_multisets_from_records_groups():
    recs = [rec(11, 1), rec(11, 2), rec(13, 1)]
    out = multisets_from_records(recs)
    assert [(m.level, len(m)) for m in out] == [(11, 2), (13, 1)]
