import json
import subprocess
import sys

import pytest

from latvoa.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_character(capsys):
    code, out, _ = run(capsys, "character", "--order", "2")
    assert code == 0
    assert "24/1" in out and "196884/1" in out and "21493760/1" in out


def test_series_json(capsys):
    code, out, _ = run(capsys, "--json", "series", "e4", "--order", "3")
    assert code == 0
    data = json.loads(out)
    assert "240/1" in json.dumps(data)


def test_output_is_deterministic(capsys):
    first = run(capsys, "--json", "theta", "--lattice", "E8", "--order", "3")
    second = run(capsys, "--json", "theta", "--lattice", "E8", "--order", "3")
    assert first == second and first[0] == 0


def test_n2_bracket(capsys):
    code, out, _ = run(capsys, "n2", "bracket", "--x", "u:1", "--y", "v:1")
    assert code == 0
    assert "e^[[1, 1], [1, 1]]" in out


def test_n2_classify_and_sl2(capsys):
    assert run(capsys, "n2", "classify", "--x", "v:1/2")[0] == 0
    code, out, _ = run(capsys, "n2", "sl2", "--x", "u:1", "--matrix", "0,-1;1,0", "--side", "right")
    assert code == 0 and "e^[[-1, 1], [0, 0]]" in out


def test_physical_two_routes(capsys):
    code, out, _ = run(capsys, "--json", "physical", "--lattice", "II11+A2", "--alpha", "0,1,1,0")
    assert code == 0
    data = json.loads(out)
    assert data["quotient"] == data["quotient_second_route"]


def test_bkm_matrix(capsys):
    code, out, _ = run(capsys, "bkm", "--matrix", "2,-1;-1,2")
    assert code == 0 and out.strip() == "BKM matrix"
    code, out, _ = run(capsys, "bkm", "--matrix", "1,0;0,2")
    assert code == 0 and "condition 1" in out


def test_denominator_and_hecke(capsys):
    assert run(capsys, "denominator", "--roots", "A1", "--v0", "0", "--order", "3")[0] == 0
    assert run(capsys, "hecke", "--l", "2", "--order", "8")[0] == 0


@pytest.mark.parametrize("argv", [
    ["theta", "--lattice", "F4"],
    ["cocycle", "--lattice", "A2", "--alpha", "1", "--beta", "0,1"],
    ["series", "nonsense"],
    ["n2", "sl2", "--x", "u:1", "--matrix", "2,0;0,1"],
    ["verify-all", "--only", "x"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_falsified_criterion_exits_1(capsys):
    code, out, _ = run(capsys, "verify-all", "--only", "9")
    assert code == 1
    assert out.startswith("[FAIL] criterion  9")


def test_passing_criterion_exits_0(capsys):
    code, out, _ = run(capsys, "verify-all", "--only", "1,10")
    assert code == 0
    assert out.count("[PASS]") == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "latvoa", "cocycle", "--lattice", "A2",
                          "--alpha", "1,0", "--beta", "0,1"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "eps =" in res.stdout
