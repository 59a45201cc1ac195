"""The command line: outputs, exit codes, JSON reports and witness replay."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from uag.cli import COMMANDS, main, replay
from uag.errors import UagError

S = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, tmp_path, *argv):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, *argv, "--json", path)
    return code, json.loads(path.read_text())


# --- each command ----------------------------------------------------------------------


def test_solve(capsys):
    code, out, _ = run(capsys, "solve", "--algebra", S / "z4.alg", "--system", S / "two_x.sys")
    assert code == 0 and "2 of 4 points" in out and "(x=2)" in out


def test_closure(capsys, tmp_path):
    code, rep = report(capsys, tmp_path, "closure", "--algebra", S / "z4.alg", "--system", S / "two_x.sys")
    assert code == 0 and rep["result"]["num_blocks"] == 2
    assert sorted(map(sorted, rep["result"]["blocks"])) == [["add(x,x)", "zero"], ["neg(x)", "x"]]


def test_member_and_quasi_check(capsys, tmp_path):
    for cmd in ("member", "quasi-check"):
        code, rep = report(capsys, tmp_path, cmd, "--algebra", S / "z4.alg", "--system", S / "two_x.quasi")
        assert code == 1 and rep["result"]["holds"] is False
        assert rep["witnesses"][0]["kind"] == "quasi_counterexample" and rep["witnesses"][0]["point"] == [2]
    good = tmp_path / "good.quasi"
    good.write_text("quasi q over x { add(x,x) = zero => add(x,add(x,x)) = x }")
    for cmd in ("member", "quasi-check"):
        assert run(capsys, cmd, "--algebra", S / "z2.alg", "--system", good)[0] == 0


def test_member_random_suite(capsys):
    code, out, _ = run(capsys, "member", "--algebra", S / "z4.alg", "--seed", 7)
    assert code == 0 and "1000 random cases, 0 mismatches" in out


def test_lattice_and_dot(capsys, tmp_path):
    dot = tmp_path / "l.dot"
    code, rep = report(capsys, tmp_path, "lattice", "--algebra", S / "z4.alg", "--dot", dot)
    assert code == 0 and rep["result"]["anti_isomorphic"] is True
    text = dot.read_text()
    assert text.startswith("digraph") and text.count("->") == 2


def test_acc(capsys):
    code, out, _ = run(capsys, "acc", "--algebra", S / "z4.alg")
    assert code == 0 and "longest chain of closed congruences: 3" in out


def test_equiv_verdicts(capsys, tmp_path):
    assert run(capsys, "equiv", "--algebra", S / "z2.alg", "--algebra2", S / "klein.alg")[0] == 0
    code, rep = report(capsys, tmp_path, "equiv", "--algebra", S / "z2.alg", "--algebra2", S / "z4.alg")
    assert code == 1 and {w["kind"] for w in rep["witnesses"]} == {"inseparable", "closure"}


def test_quasi_compare(capsys):
    code, out, _ = run(capsys, "quasi-compare", "--algebra", S / "z2.alg", "--algebra2", S / "z4.alg")
    assert code == 1 and "add(x,x) = zero" in out
    assert run(capsys, "quasi-compare", "--algebra", S / "z2.alg", "--algebra2", S / "klein.alg", "--max-vars", 2)[0] == 0


def test_opposite(capsys):
    code, out, _ = run(capsys, "opposite", "--algebra", S / "left_zero.alg", "--system", S / "lz.sys")
    assert code == 0 and "table [[0,1],[0,1]]" in out and "mirror transport" in out


def test_twist(capsys, tmp_path):
    code, rep = report(capsys, tmp_path, "twist", "--algebra", S / "f4.alg", "--vars", "x")
    assert code == 0 and rep["result"]["bijection"]["ok"] and rep["result"]["bijection"]["nodes"] == [16, 16]
    assert run(capsys, "twist", "--algebra", S / "f4.alg", "--sigma", "bogus")[0] == 2
    assert run(capsys, "twist", "--algebra", S / "z2.alg")[0] == 2


def test_category_and_duality(capsys, tmp_path):
    dot = tmp_path / "c.dot"
    code, rep = report(capsys, tmp_path, "category", "--algebra", S / "z4.alg", "--dot", dot)
    assert code == 0 and dot.read_text().startswith("digraph")
    code, out, _ = run(capsys, "duality", "--algebra", S / "z4.alg")
    assert code == 0 and "ok" in out


def test_tau_rho_and_alpha(capsys):
    assert run(capsys, "tau-rho", "--algebra", S / "z4.alg", "--vars", "x,y")[0] == 0
    assert run(capsys, "alpha", "--algebra", S / "z4.alg", "--vars", "x,y")[0] == 0
    code, out, _ = run(capsys, "alpha", "--algebra", S / "f4.alg", "--sigma", "frob")
    assert code == 0 and "16/16" in out


def test_almost_equiv(capsys):
    assert run(capsys, "almost-equiv", "--algebra", S / "left_zero.alg", "--algebra2", S / "right_zero.alg")[0] == 0
    assert run(capsys, "almost-equiv", "--algebra", S / "z2.alg", "--algebra2", S / "z4.alg")[0] == 1


# --- exit codes and reports -----------------------------------------------------------------


def test_usage_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.alg"
    bad.write_text("algebra A { carrier 2 op f/1 table [0,5] }")
    code, _, err = run(capsys, "solve", "--algebra", bad, "--system", S / "two_x.sys")
    assert code == 2 and "line 1, col" in err and "out of range" in err
    assert run(capsys, "solve", "--system", S / "two_x.sys")[0] == 2
    assert run(capsys, "solve", "--algebra", tmp_path / "missing.alg", "--system", S / "two_x.sys")[0] == 2
    assert run(capsys, "lattice", "--algebra", S / "z2.alg", "--vars", ",")[0] == 2
    with pytest.raises(SystemExit) as ei:
        main(["no-such-command"])
    assert ei.value.code == 2


def test_cap_exceeded_exits_3(capsys):
    code, _, err = run(capsys, "lattice", "--algebra", S / "z4.alg", "--vars", "x,y", "--cap-points", 4)
    assert code == 3 and "cap exceeded" in err


def test_envelope_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        run(capsys, "lattice", "--algebra", S / "z4.alg", "--vars", "x,y", "--json", p)
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert set(rep) == {"schema", "command", "inputs", "result", "witnesses"}
    assert rep["schema"] == "uag/1" and rep["command"] == "lattice" and rep["inputs"]["vars"] == ["x", "y"]


@pytest.mark.parametrize(
    "argv",
    [
        ["equiv", "--algebra", S / "z2.alg", "--algebra2", S / "z4.alg"],
        ["quasi-check", "--algebra", S / "z4.alg", "--system", S / "two_x.quasi"],
        ["quasi-compare", "--algebra", S / "z2.alg", "--algebra2", S / "z4.alg"],
    ],
    ids=["equiv", "quasi-check", "quasi-compare"],
)
def test_verify_witness(capsys, tmp_path, argv):
    path = tmp_path / "w.json"
    run(capsys, *argv, "--json", path)
    n = len(json.loads(path.read_text())["witnesses"])
    code, out, _ = run(capsys, "verify-witness", path)
    assert n > 0 and code == 0 and f"{n}/{n} witnesses re-validated" in out


def test_tampered_witness_fails(capsys, tmp_path):
    path = tmp_path / "w.json"
    run(capsys, "quasi-check", "--algebra", S / "z4.alg", "--system", S / "two_x.quasi", "--json", path)
    rep = json.loads(path.read_text())
    rep["witnesses"][0]["point"] = [1]
    path.write_text(json.dumps(rep))
    assert run(capsys, "verify-witness", path)[0] == 1
    path.write_text("{}")
    assert run(capsys, "verify-witness", path)[0] == 2
    with pytest.raises(UagError):
        replay({"kind": "nonsense"})


def test_every_command_has_a_test():
    src = Path(__file__).read_text()
    assert all(f'"{c}"' in src for c in COMMANDS)
