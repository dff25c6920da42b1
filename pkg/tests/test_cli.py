import csv
import json

import pytest

from moebius_lab.cache import read_cache
from moebius_lab.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture(scope="module")
def cache_1e6(tmp_path_factory):
    d = tmp_path_factory.mktemp("c")
    p = d / "mu.mut"
    assert main(["compute", "--n", "1000000", "--cache", str(p)]) == EXIT_OK
    return p


def test_compute_summary(tmp_path, capsys):
    p = tmp_path / "six.mut"
    code, s = run(capsys, "compute", "--n", "6", "--cache", str(p))
    assert code == EXIT_OK
    assert s["mertens_at_n_max"] == -1 and s["n_max"] == 6
    assert set(s) >= {"n_max", "elapsed_seconds", "mertens_at_n_max", "checksum"}
    assert p.stat().st_size == 12 + 6


def test_compute_size(cache_1e6):
    assert cache_1e6.stat().st_size == 12 + 10**6


def test_compute_errors(tmp_path, capsys):
    assert main(["compute", "--n", "0", "--cache", str(tmp_path / "x")]) == EXIT_USAGE
    assert main(["compute", "--n", "10", "--cache", str(tmp_path / "no" / "such" / "dir" / "x")]) == EXIT_IO
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["compute", "--n", "ten"]) == EXIT_USAGE


def test_verify_ok(cache_1e6, capsys):
    code, s = run(capsys, "verify", "--cache", str(cache_1e6))
    assert code == EXIT_OK and s["ok"]
    assert [c["name"] for c in s["checks"]] == [
        "trit_range", "sieve_equivalence", "roots_of_unity", "inverse_UV", "redheffer_determinant"]


def test_verify_fresh_small(tmp_path, capsys):
    missing = str(tmp_path / "none.mut")
    assert run(capsys, "verify", "--n", "1", "--cache", missing)[0] == EXIT_OK
    assert run(capsys, "verify", "--n", "5000", "--cache", missing)[0] == EXIT_OK
    assert run(capsys, "verify", "--cache", missing)[0] == EXIT_IO


@pytest.mark.parametrize("index,new", [(1, 0), (97, 1), (130, 7), (5000, -1)])
def test_verify_flags_corruption(tmp_path, capsys, index, new):
    p = tmp_path / "c.mut"
    main(["compute", "--n", "10000", "--cache", str(p)])
    capsys.readouterr()
    raw = bytearray(p.read_bytes())
    raw[12 + index - 1] = new & 0xFF
    p.write_bytes(bytes(raw))
    code, s = run(capsys, "verify", "--cache", str(p))
    assert code == EXIT_VERIFY and not s["ok"]
    sieve = next(c for c in s["checks"] if c["name"] == "sieve_equivalence")
    assert sieve["first_bad_index"] == index


def test_stats(cache_1e6, tmp_path, capsys):
    code, s = run(capsys, "stats", "--cache", str(cache_1e6), "--block", "10000", "--out", str(tmp_path))
    assert code == EXIT_OK and s["blocks"] == 100
    with open(tmp_path / "block_stats_10000.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == "block,len,n_minus,n_zero,n_plus,pe_minus,pe_zero,pe_plus,pt_minus,pt_zero,pt_plus".split(",")
    assert len(rows) == 101
    with open(tmp_path / "hist_mertens_10000.csv") as f:
        hist = list(csv.reader(f))
    assert hist[0] == ["bin_center", "density", "normal_density"] and len(hist) == 42


def test_stats_json_format(cache_1e6, tmp_path, capsys):
    code, s = run(capsys, "stats", "--cache", str(cache_1e6), "--block", "1000", "--format", "json",
                  "--out", str(tmp_path))
    assert code == EXIT_OK
    data = json.loads((tmp_path / "block_stats_1000.json").read_text())
    assert len(data) == 200 and data[0]["block"] == 1
    assert "skipped" in s["histograms"]  # block 1000 is below the CLT regime


def test_mertens(cache_1e6, tmp_path, capsys):
    code, s = run(capsys, "mertens", "--cache", str(cache_1e6), "--stride", "1000", "--out", str(tmp_path))
    assert code == EXIT_OK and s["mertens_at_n_max"] == 212
    with open(tmp_path / "mertens.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["n", "m", "running_mean"] and len(rows) == 1001
    assert rows[-1] == ["1000000", "212", str(212 / 10**6)]


def test_bound(cache_1e6, capsys):
    code, s = run(capsys, "bound", "--cache", str(cache_1e6), "--alpha", "0.05", "--n", "1000000")
    assert code == EXIT_OK
    clt, cheb = s["reports"]
    assert clt["method"] == "clt" and clt["bound"] == pytest.approx(1528.3, abs=0.2) and clt["holds"]
    assert cheb["method"] == "chebyshev" and cheb["squarefree_m"] == 212
    assert 0.0993 <= s["mertens_type_prob_c1"] <= 0.1003


def test_bound_errors(cache_1e6, tmp_path, capsys):
    assert main(["bound", "--cache", str(cache_1e6), "--alpha", "1.5"]) == EXIT_USAGE
    assert main(["bound", "--cache", str(cache_1e6), "--n", "2000000"]) == EXIT_USAGE
    assert main(["bound", "--cache", str(tmp_path / "missing")]) == EXIT_IO


def test_psd(cache_1e6, tmp_path, capsys):
    code, s = run(capsys, "psd", "--cache", str(cache_1e6), "--segment", "4096", "--out", str(tmp_path))
    assert code == EXIT_OK and s["bins"] == 2049 and s["peak_ratio"] < 2
    with open(tmp_path / "psd.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["freq", "power"] and len(rows) == 2050
    assert main(["psd", "--cache", str(cache_1e6), "--segment", "1000", "--out", str(tmp_path)]) == EXIT_USAGE


def test_outputs_deterministic(cache_1e6, tmp_path, capsys):
    for d in ("a", "b"):
        main(["stats", "--cache", str(cache_1e6), "--block", "10000", "--out", str(tmp_path / d)])
        main(["psd", "--cache", str(cache_1e6), "--segment", "4096", "--out", str(tmp_path / d)])
    for name in ("block_stats_10000.csv", "hist_mertens_10000.csv", "hist_abs_10000.csv", "psd.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert read_cache(cache_1e6).n_max == 10**6
