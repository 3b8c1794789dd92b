"""Regenerate the committed dataset fixtures: python3 tests/fixtures/make_fixtures.py"""
from pathlib import Path

from heckedist.characters import MINUS_ONE, ONE, DirichletCharacter, RootOfUnity, evaluate
from heckedist.chebyshev import MeasureP, sample
from heckedist.dataset import DatasetFile, DatasetHeader, write_dataset
from heckedist.spectra import EigenRecord, denormalize

HERE = Path(__file__).resolve().parent
FAMILY_SEED = 20260101
FAMILY_SIZES = (100, 1000, 10_000)


def _ap_record(N, k, chi, p, lam, form_id, degree):
    z = evaluate(chi, p) if chi is not None else ONE
    return EigenRecord(N, k, chi, p, ap=denormalize(lam, z, p, k), field_degree=degree, form_id=form_id)


def valid3():
    chi5 = DirichletCharacter(5, (RootOfUnity(1, 4),))
    chi8 = DirichletCharacter(8, (MINUS_ONE, ONE))
    recs = (
        _ap_record(11, 2, None, 3, -1 / 3**0.5, "11.2.a.a", 1),
        _ap_record(5, 3, chi5, 2, 2**0.5, "5.3.c.a", 2),
        _ap_record(8, 3, chi8, 3, -0.75, "8.3.d.a", 1),
    )
    return DatasetFile(DatasetHeader(source="fixture", complete=False), recs)


def family():
    recs = []
    for i, size in enumerate(FAMILY_SIZES):
        for j, v in enumerate(sample(MeasureP(2), size, FAMILY_SEED + i)):
            recs.append(EigenRecord(size + 1, 2, None, 2, lam=float(v), form_id=f"synthetic.{size + 1}.{j}"))
    header = DatasetHeader(source=f"synthetic mu_2 seeds {FAMILY_SEED}+i", complete=True)
    return DatasetFile(header, tuple(recs))


BAD = """{"schema": 1, "source": "fixture", "complete": false, "branch": "exp(-i*pi*t)"}
{"level": 11, "weight": 2, "p": 3, "lambda": 0.5}
{"level": 10, "weight": 2, "p": 5, "lambda": 0.5}
{"level": 11, "weight": 2, "p": 3, "lambda": 
{"level": 11, "weight": 2, "p": 3, "ap": [1.0, 0.7]}
"""


def main():
    write_dataset(valid3(), HERE / "valid3.jsonl")
    write_dataset(DatasetFile(DatasetHeader(source="fixture", complete=True)), HERE / "header_only.jsonl")
    write_dataset(family(), HERE / "family.jsonl")
    (HERE / "bad.jsonl").write_text(BAD)


if __name__ == "__main__":
    main()
