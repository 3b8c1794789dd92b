import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from heckedist.cli import fmt, main
from heckedist.remote import RemoteConfig, SpaceQuery, fetch_remote
from fractions import Fraction

FIX = Path(__file__).parent / "fixtures"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_fmt():
    assert fmt(Fraction(1, 4)) == "1/4"
    assert fmt(Fraction(4)) == "4"
    assert fmt(0.1) == "0.10000000000000001"


def test_psi_examples():
    assert run("psi", "--N", "12", "--f", "3") == (0, "4\n")
    assert run("psi", "--func", "psi", "--n", "6") == (0, "12\n")
    assert run("psi", "--func", "beta", "--n", "8") == (0, "3\n")
    assert run("psi", "--N", "8", "--f", "4") == (0, "0\n")


def test_predict():
    assert run("predict", "--p", "2", "--n", "4") == (0, "1/4\n")
    code, text = run("predict", "--p", "5", "--n", "0", "--N", "12", "--f", "3", "--k", "2")
    assert code == 0 and text.splitlines()[1] == "1,1/3,1/3"
    assert run("predict", "--p", "3", "--N", "12", "--f", "3", "--k", "13", "--m", "4")[1] == "2\n"


def test_domain_errors_exit_1(capsys):
    assert run("predict", "--p", "4", "--n", "2")[0] == 1
    assert run("predict", "--p", "3", "--n", "2", "--N", "8", "--f", "4", "--k", "3")[0] == 1
    assert "dim" in capsys.readouterr().err
    assert run("psi", "--N", "12", "--f", "5")[0] == 1


def test_usage_errors_exit_64():
    for argv in (["psi", "--bogus"], ["nosuch"], [], ["predict"], ["sample", "--p", "2", "--count", "x"]):
        with pytest.raises(SystemExit) as info:
            main(argv, io.StringIO())
        assert info.value.code == 64


def test_moments_table():
    code, text = run("moments", "--p", "3", "--nmax", "6")
    rows = [l.split(",") for l in text.splitlines()[1:]]
    assert code == 0 and len(rows) == 7
    assert rows[2][2] == "1/3"
    assert all(float(r[3]) <= 1e-10 for r in rows)


@pytest.mark.parametrize("cmd", ["density", "cdf"])
def test_tables(cmd):
    code, text = run(cmd, "--p", "inf", "--points", "5")
    lines = text.splitlines()
    assert code == 0 and lines[0] == f"x,{cmd}" and len(lines) == 6
    mid = float(lines[3].split(",")[1])
    assert mid == pytest.approx(1 / 3.141592653589793 if cmd == "density" else 0.5, abs=1e-10)
    assert run(cmd, "--p", "6")[0] == 1


def test_sample_is_reproducible():
    a = run("sample", "--p", "2", "--count", "50", "--seed", "11")
    b = run("sample", "--p", "2", "--count", "50", "--seed", "11")
    c = run("sample", "--p", "2", "--count", "50", "--seed", "12")
    assert a == b and a != c
    assert all(-2 <= float(v) <= 2 for v in a[1].split())


def test_sample_dataset_then_analyze(tmp_path):
    ds = tmp_path / "s.jsonl"
    assert run("sample", "--p", "3", "--count", "400", "--seed", "5", "--dataset", str(ds), "--level", "7")[0] == 0
    first = ds.read_bytes()
    run("sample", "--p", "3", "--count", "400", "--seed", "5", "--dataset", str(ds), "--level", "7")
    assert ds.read_bytes() == first
    code, text = run("analyze", "--in", str(ds), "--p", "3", "--nmax", "4")
    assert code == 0 and json.loads(text)["family"][0]["dimension"] == 400
    assert run("sample", "--p", "inf", "--count", "3", "--dataset", str(tmp_path / "x.jsonl"))[0] == 1


def test_analyze_family_fixture(tmp_path):
    out = tmp_path / "report.json"
    prefix = tmp_path / "r"
    code, _ = run("analyze", "--in", str(FIX / "family.jsonl"), "--p", "2", "--nmax", "10",
                  "--out", str(out), "--csv", str(prefix), "--workers", "3")
    assert code == 0
    rep = json.loads(out.read_text())
    ks = [s["ks"] for s in rep["family"]]
    assert [s["N"] for s in rep["family"]] == [101, 1001, 10001]
    assert ks[0] > ks[1] > ks[2] and ks[2] <= 0.03
    assert rep["trend"]["ks_strictly_decreasing"] is True
    assert rep["family"][2]["max_abs_error"] <= 0.05
    assert "exp(-pi*i*t)" in rep["branch_convention"]
    assert len((tmp_path / "r_moments.csv").read_text().splitlines()) == 1 + 3 * 11
    assert len((tmp_path / "r_ks.csv").read_text().splitlines()) == 4
    again = tmp_path / "again.json"
    run("analyze", "--in", str(FIX / "family.jsonl"), "--p", "2", "--nmax", "10", "--out", str(again))
    assert again.read_bytes() == out.read_bytes()


def test_analyze_errors():
    assert run("analyze", "--in", str(FIX / "bad.jsonl"), "--p", "3")[0] == 2
    assert run("analyze", "--in", str(FIX / "valid3.jsonl"), "--p", "7")[0] == 1
    assert run("analyze", "--in", str(FIX / "nope.jsonl"), "--p", "7")[0] == 1


def test_fetch_offline_from_cache(tmp_path, monkeypatch):
    endpoint = "https://db.test/api"
    payload = {"data": [{"level": 11, "weight": 2, "lambda": 0.25, "label": "11.2.a.a"}]}
    cfg = RemoteConfig(endpoint=endpoint, cache_dir=tmp_path / "cache")
    fetch_remote(SpaceQuery((11, 11), (2, 2), 3, conductor=1), cfg, lambda u, p, t: json.dumps(payload).encode())
    monkeypatch.setenv("HECKEDIST_ENDPOINT", endpoint)
    monkeypatch.delenv("HECKEDIST_CONFIG", raising=False)
    argv = ["fetch", "--levels", "11", "--p", "3", "--conductor", "1", "--offline", "--cache-dir", str(tmp_path / "cache")]
    code, a = run(*argv)
    _, b = run(*argv)
    assert code == 0 and a == b
    assert json.loads(a.splitlines()[1])["lambda"] == 0.25
    assert run("fetch", "--levels", "13", "--p", "3", "--conductor", "1", "--offline",
               "--cache-dir", str(tmp_path / "cache"))[0] == 3


def test_fetch_exceptional_advisory(tmp_path, capsys):
    code, text = run("fetch", "--levels", "8", "--weights", "3", "--p", "3", "--conductor", "4",
                     "--offline", "--cache-dir", str(tmp_path))
    assert code == 0 and len(text.splitlines()) == 1
    assert "dim S_k^new" in capsys.readouterr().err


def test_check_quick():
    code, text = run("check")
    assert code == 0
    assert text.count("[PASS]") == len(text.splitlines())


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "heckedist.cli", "psi", "--N", "12", "--f", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "4\n"
    proc = subprocess.run([sys.executable, "-m", "heckedist.cli", "psi", "--nope"], capture_output=True, text=True)
    assert proc.returncode == 64 and "usage" in proc.stderr
