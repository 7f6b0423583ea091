import json
import subprocess
import sys

import pytest

from tmotive_lab.cli import EXIT_FAIL, EXIT_OK, EXIT_PARSE, EXIT_PRECISION, main, ordered_map


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_triv_json(capsys):
    code, out, _ = run(capsys, "verify-triv", "--module", "carlitz3", "--n", "1", "--json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["pass"] and [lv["n"] for lv in data["levels"]] == [0, 1]
    assert {c["name"] for c in data["levels"][0]["checks"]} >= {"frobenius_residual", "det_phi"}


def test_galois_dim_text(capsys):
    code, out, _ = run(capsys, "galois-dim", "--module", "cm4", "--n", "2", "--cross-check")
    assert code == EXIT_OK
    assert "n=2: rankB=2 s=2 dim=6" in out
    assert "match" in out


def test_quasilog(capsys):
    code, out, _ = run(capsys, "quasilog", "--module", "carlitz3", "--n", "1", "--prec", "30", "--json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["quasi_logs"][0]["certified_prec"] >= 30
    assert all(all(c["pass"] for c in e["checks"]) for e in data["extensions"])


def test_eliminate(capsys):
    code, out, _ = run(capsys, "eliminate", "--module", "cm4", "--n", "1", "--json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["rank"] == data["expected_rank"] == 4


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.mod"
    bad.write_text("p = 2\nr = 1\nkappa1 = theta +\n")
    code, _, err = run(capsys, "verify-triv", "--module", str(bad))
    assert code == EXIT_PARSE
    assert "line 3" in err


def test_precision_exit_code(capsys):
    code, _, err = run(capsys, "verify-triv", "--module", "cm4", "--prec", "6", "--tdeg", "3", "--n", "0")
    assert code == EXIT_PRECISION
    assert "--prec" in err


def test_missing_module(capsys):
    code, _, err = run(capsys, "verify-triv", "--module", "no-such-module")
    assert code == EXIT_FAIL and "not found" in err


def test_missing_periods(tmp_path, capsys):
    mod = tmp_path / "np.mod"
    mod.write_text("p = 3\nm = 2\nr = 1\nkappa1 = 1\n")
    code, _, err = run(capsys, "verify-triv", "--module", str(mod))
    assert code == EXIT_FAIL and "periods" in err


def test_json_is_byte_identical(capsys):
    first = run(capsys, "galois-dim", "--module", "cm4", "--n", "1", "--json", "--seed", "7")[1]
    second = run(capsys, "galois-dim", "--module", "cm4", "--n", "1", "--json", "--seed", "7")[1]
    assert first == second


def test_thread_count_does_not_change_output(capsys, monkeypatch):
    monkeypatch.setenv("TMOTIVE_THREADS", "1")
    one = run(capsys, "verify-triv", "--module", "cm4", "--n", "2", "--json")[1]
    monkeypatch.setenv("TMOTIVE_THREADS", "4")
    four = run(capsys, "verify-triv", "--module", "cm4", "--n", "2", "--json")[1]
    assert one == four


def test_ordered_map_keeps_order(monkeypatch):
    monkeypatch.setenv("TMOTIVE_THREADS", "3")
    assert ordered_map(lambda x: x * x, range(10)) == [x * x for x in range(10)]


def test_unknown_command():
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_console_script_selftest():
    proc = subprocess.run(
        [sys.executable, "-m", "tmotive_lab.cli", "selftest", "--n", "1"],
        capture_output=True, text=True, timeout=300,
    )
    assert proc.returncode == 0, proc.stderr
    assert "selftest: PASS" in proc.stdout
