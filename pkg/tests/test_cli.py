import json
import subprocess
import sys

import pytest

from symtate.cli import emit, main, parse, run

CHEAP = [
    ["xn-report", "3", "7"],
    ["homology", "--example", "rabinowitz", "--window", "-2", "4", "--a", "-1"],
    ["homology", "--example", "local", "--n", "3", "--window", "-2", "2"],
    ["flow", "heat", "--x0", "0.5"],
    ["localize", "--endo", "[[1,0],[0,0]]"],
    ["localize", "--counterexample", "3"],
    ["group-qa", "--seq", "k+1", "--depth", "30"],
    ["group-qa", "--seq", "periodic:2", "--depth", "20"],
    ["diagram", "--example", "cn", "--window", "0", "2", "--horizon", "4", "--no-probe"],
    ["backwards", "--example", "cn", "--horizon", "4", "--window", "0", "4"],
    ["towers", "--example", "cn", "--horizon", "4", "--window", "0", "4"],
]


@pytest.mark.parametrize("argv", CHEAP, ids=lambda a: " ".join(a[:2]))
def test_reports_round_trip_through_json(argv):
    r = run(argv)
    assert r["passed"], r["checks"]
    back = parse(emit(r, "json"))
    assert back == {k: v for k, v in r.items() if k != "_text"}
    text = emit(r)
    assert text.endswith("all checks passed")


def test_exit_codes(capsys):
    assert main(["xn-report", "4"]) == 0
    # an impossible tolerance makes a check fail
    assert main(["flow", "heat", "--x0", "0.5", "--tol", "1e-20"]) == 1
    assert "[FAIL] closed form matched" in capsys.readouterr().out
    assert main(["group-qa", "--seq", "list:x"]) == 2
    assert "ParseError" in capsys.readouterr().err


def test_group_qa_verdicts():
    r = run(["group-qa", "--seq", "periodic:2", "--depth", "20"])
    assert r["result"]["verdict"].startswith("criterion fails")
    assert run(["group-qa", "--seq", "ones", "--depth", "10"])["result"]["verdict"] == \
        "isomorphic to Z"


def test_flow_dump(tmp_path):
    out = tmp_path / "traj.txt"
    r = run(["flow", "rabinowitz", "--s-end", "0.5", "--dump", str(out)])
    assert r["passed"]
    head = out.read_text().splitlines()[0].split()
    assert head[:3] == ["s", "action", "eta"]


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "symtate", "--format", "json", "xn-report", "2"],
                       capture_output=True, text=True, timeout=60)
    assert p.returncode == 0
    assert json.loads(p.stdout)["command"] == "xn-report"
