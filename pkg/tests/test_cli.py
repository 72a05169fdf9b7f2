import subprocess
import sys

import pytest

from closedforms.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {
        "X0.field": "1 1\n0 -2\n-1 1\n",
        "Y0.field": "1 1\n0 -1\n",
        "x0.coeffs": "degree 1 window 5\n0 1\n",
        "y0exact.coeffs": "degree 1 window 5\n0 -1\n1 1\n",
        "c.orbit": "degree 2\n0 0 1\n0 2 -1/2\n",
        "bad.coeffs": "degree one\n",
        "x0.exp": "0:1\t1\n",
    }.items():
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    return paths


def test_roots_table(capsys, files):
    code, out, _ = run(capsys, "roots", "--field", files["X0.field"])
    assert code == 0
    assert out.startswith("1 (multiplicity 2)")
    code, out, _ = run(capsys, "roots", "--field", "d0")
    assert "none" in out
    code, out, _ = run(capsys, "roots", "--field", "d3-d0", "--emit", "machine")
    assert out.count("record=root") == 3


def test_check_closed_exit_codes(capsys, files):
    code, out, _ = run(capsys, "check-closed", "--field", files["Y0.field"], "--coeffs", files["x0.coeffs"])
    assert code == 1
    assert "violation n=-1" in out and "violation n=1" in out
    code, _, _ = run(capsys, "check-closed", "--field", "Y0", "--coeffs", files["y0exact.coeffs"])
    assert code == 0
    code, _, _ = run(capsys, "check-closed", "--field", "X0", "--expansion", files["x0.exp"])
    assert code == 0
    code, _, _ = run(capsys, "check-closed", "--field", "Y0", "--expansion", files["x0.exp"], "--window", "3")
    assert code == 1


def test_parse_errors(capsys, files, tmp_path):
    code, _, err = run(capsys, "check-closed", "--field", "Y0", "--coeffs", files["bad.coeffs"])
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "check-closed", "--field", str(tmp_path / "nope.field"), "--coeffs", files["x0.coeffs"])
    assert code == 2
    code, _, _ = run(capsys, "approximate", "--field", "X0", "--coeffs", files["x0.coeffs"], "--schedule", "1,x")
    assert code == 2
    code, _, _ = run(capsys, "no-such-command")
    assert code == 2


def test_precondition_errors(capsys, files):
    code, _, _ = run(capsys, "approximate", "--field", "X0", "--coeffs", files["x0.coeffs"],
                     "--mask", "10", "--grid", "4", "--truncate", "2")
    assert code == 3
    code, _, _ = run(capsys, "orbits", "--degree", "1", "--bound", "0")
    assert code == 3
    code, _, _ = run(capsys, "gen-exact", "--field", "X0", "--orbit-fn", files["c.orbit"], "--window", "1")
    assert code == 3


def test_approximate_default(capsys, files):
    code, out, _ = run(capsys, "approximate", "--field", files["X0.field"], "--coeffs", files["x0.coeffs"],
                       "--schedule", "default", "--emit", "machine")
    assert code == 0
    stages = [ln for ln in out.splitlines() if ln.startswith("record=stage")]
    res = [float(ln.split(" residual=")[1].split()[0]) for ln in stages]
    assert len(res) == 3 and res[0] > res[1] > res[2]


def test_gen_exact_roundtrip(capsys, files, tmp_path):
    out_file = tmp_path / "xi.coeffs"
    code, out, _ = run(capsys, "gen-exact", "--field", "Y0", "--orbit-fn", files["c.orbit"],
                       "--out-coeffs", str(out_file))
    assert code == 0 and "closed=True" in out
    code, _, _ = run(capsys, "check-closed", "--field", "Y0", "--coeffs", str(out_file), "--zero-outside")
    assert code == 0
    code, out, _ = run(capsys, "graph", "--degree", "2", "--bound", "6", "--coeffs", str(out_file))
    assert code == 0 and "ok=1" in out


def test_graph_x0_fails(capsys, files):
    code, out, _ = run(capsys, "graph", "--degree", "1", "--bound", "4", "--coeffs", files["x0.coeffs"], "--dump")
    assert code == 1
    assert "max_abs_cycle_sum=1" in out
    assert "0 | 1 | 0:1 | 1.0" in out


def test_orbits_and_region(capsys):
    code, out, _ = run(capsys, "orbits", "--degree", "2", "--bound", "1")
    assert code == 0 and len(out.splitlines()) == 3
    code, out, _ = run(capsys, "region", "--degree", "2", "--truncate", "2")
    assert out.splitlines()[0] == "N=2 kind=P i=2" and len(out.splitlines()) == 8


def test_validate(capsys):
    code, out, _ = run(capsys, "validate")
    assert code == 0 and "FAIL" not in out


def test_out_flag_and_determinism(capsys, files, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for target in (a, b):
        run(capsys, "approximate", "--field", "Y0", "--coeffs", files["y0exact.coeffs"],
            "--schedule", "10,256,64;20,1024,256", "--emit", "machine", "--out", str(target))
    assert a.read_text() == b.read_text() != ""


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "closedforms", "roots", "--field", "Y0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "multiplicity 1" in proc.stdout
