import io
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hybridfrac.cli import EXIT_CERT, EXIT_IO, EXIT_NOCONV, EXIT_OK, main

PROBLEMS = Path(__file__).resolve().parents[1] / "problems"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def kv(text):
    d = {}
    for line in text.splitlines():
        if " = " in line and not line.startswith("#"):
            k, v = line.split(" = ", 1)
            d.setdefault(k, v)
    return d


def csv_block(text, header):
    lines = text.splitlines()
    i = lines.index(header)
    rows = []
    for line in lines[i + 1 :]:
        if not line or line.startswith("#"):
            break
        rows.append(line.split(","))
    return rows


def test_check_example1():
    code, text = run("check", "@example1")
    assert code == EXIT_OK
    d = kv(text)
    assert float(d["K1"]) == 0.5
    assert float(d["K2"]) == pytest.approx(2 / 3)
    assert float(d["r0"]) <= 0.8
    assert d["certified"] == "true"


def test_check_large_k2():
    code, text = run("check", str(PROBLEMS / "large_k2.txt"))
    assert code == EXIT_CERT
    assert kv(text)["r0"] == "none"


def test_check_missing_key(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("alpha = 0.5\nf = 1\ng = 1\nphi = t\nk = 0.5\nr = 0.5\n")
    code, _ = run("check", str(p))
    assert code == EXIT_IO
    assert "rho" in capsys.readouterr().err


def test_missing_file(capsys):
    code, _ = run("solve", "/nonexistent/problem.txt")
    assert code == EXIT_IO
    assert "error" in capsys.readouterr().err


def test_check_reports_are_byte_identical():
    a = run("check", "@example1", "--seed", "7")[1]
    b = run("check", "@example1", "--seed", "7")[1]
    assert a == b
    assert "seed = 7" in a


def test_solve_manufactured_table(tmp_path):
    out = tmp_path / "x.csv"
    code, text = run("solve", str(PROBLEMS / "manufactured.txt"), "--out", str(out))
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "t,x"
    assert len(lines) == 2050
    t, x = np.loadtxt(out, delimiter=",", skiprows=1, unpack=True)
    assert np.max(np.abs(x - np.sqrt(t))) <= 5e-3
    assert "t,x" not in text


def test_solve_twelve_significant_digits():
    code, text = run("solve", "@example1", "--grid", "65")
    assert code == EXIT_OK
    rows = csv_block(text, "t,x")
    assert len(rows) == 65
    assert rows[1][0] == f"{1 / 64:.12g}"
    assert max(len(r[1].lstrip("-").replace(".", "").lstrip("0").split("e")[0]) for r in rows) <= 12


def test_solve_summary_fields():
    d = kv(run("solve", "@example1", "--grid", "257")[1])
    for key in ("iterations", "residual", "sup_norm", "sign"):
        assert key in d
    assert d["sign"] == "positive-on-(0,1)"


def test_solve_nonconvergence_still_writes(tmp_path):
    out = tmp_path / "x.csv"
    code, text = run("solve", "@example1", "--max-iter", "1", "--out", str(out))
    assert code == EXIT_NOCONV
    assert kv(text)["status"] == "not-converged"
    assert out.read_text().startswith("t,x\n")


def test_zero_forcing_solve():
    code, text = run("solve", str(PROBLEMS / "zero_forcing.txt"), "--grid", "129")
    assert code == EXIT_OK
    assert kv(text)["sign"] == "zero"


def test_diagnose_example1():
    code, text = run("diagnose", "@example1", "--grid", "257")
    assert code == EXIT_OK
    d = kv(text)
    assert d["curves_monotone"] == "true" and d["condition_m_holds"] == "true"
    assert int(d["family_size"]) == 8
    for name in ("X", "FX", "GX", "TX"):
        assert f"# modulus {name}" in text
    assert len(csv_block(text, "eps,omega_X,omega_TX,bound")) == 8


def test_diagnose_zero_forcing():
    code, text = run("diagnose", str(PROBLEMS / "zero_forcing.txt"), "--grid", "129")
    assert code == EXIT_OK
    lines = text.splitlines()
    i = lines.index("# modulus TX")
    assert all(float(r[1]) == 0 for r in csv_block("\n".join(lines[i:]), "eps,omega"))


def test_diagnose_single_iterate():
    code, text = run("diagnose", "@example1", "--grid", "129", "--max-iter", "1")
    assert code == EXIT_OK
    assert int(kv(text)["family_size"]) >= 2


def test_selftest():
    code, text = run("selftest")
    assert code == EXIT_OK
    assert "FAIL" not in text
    assert "8/8 checks passed" in text


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hybridfrac", "check", "@example1"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert run("check", "@example1")[1] == proc.stdout


def test_usage_error_exit():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code != 0
