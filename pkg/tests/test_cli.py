import json

import pytest

from stablab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_quotient_simplex(capsys):
    code, out, _ = run(capsys, "gen", "quotient-simplex", "--n", "4")
    doc = json.loads(out)
    assert code == 0
    assert doc["kind"] == "semi-simplicial"
    assert sum(len(v) for v in doc["complex"]["cells"].values()) == 4


def test_gen_polygon_arcs(capsys):
    code, out, _ = run(capsys, "gen", "polygon-arcs", "--m", "6")
    assert code == 0
    assert len(json.loads(out)["complex"]["vertices"]) == 9


def test_gen_tether_manifest(capsys, tmp_path):
    out_file = tmp_path / "t.json"
    code, _, _ = run(capsys, "gen", "tether", "--n", "3", "--d", "1", "--coconnected", "--words", "4",
                     "--bound", "6", "--out", str(out_file))
    doc = json.loads(out_file.read_text())
    assert code == 0
    assert doc["manifest"]["budgets"]["words"] == 4 and doc["manifest"]["budgets"]["bound"] == 6
    assert len(doc["labels"]["tethers"]) == len(doc["complex"]["vertices"])


def test_unknown_generator(capsys):
    code, _, err = run(capsys, "gen", "klein-bottle")
    assert code == 2
    assert json.loads(err)["error"] == "usage"


def test_missing_parameter(capsys):
    code, _, err = run(capsys, "gen", "polygon-arcs")
    assert code == 2 and "--m" in err


def test_bad_argv(capsys):
    assert run(capsys, "frobnicate")[0] == 2


def test_budget_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("STABLAB_BUDGET_FACES", "10")
    code, _, err = run(capsys, "gen", "polygon-arcs", "--m", "7")
    assert code == 3 and json.loads(err)["error"] == "budget"
    assert run(capsys, "gen", "polygon-arcs", "--m", "7", "--budget-faces", "100000")[0] == 0


def test_verify_homology_csv(capsys, tmp_path):
    f = tmp_path / "q.json"
    run(capsys, "gen", "quotient-simplex", "--n", "4", "--out", str(f))
    code, out, _ = run(capsys, "verify", "homology", str(f))
    assert code == 0
    assert out == "dimension,rank,torsion\n0,0,\n1,0,\n2,0,\n3,1,\n"


def test_verify_ordered_connectivity(capsys, tmp_path):
    f = tmp_path / "s.json"
    run(capsys, "gen", "simplex-boundary", "--n", "3", "--out", str(f))
    code, out, _ = run(capsys, "verify", "ordered-connectivity", str(f), "--n", "2")
    assert code == 0 and json.loads(out)["pass"]


def test_verify_stability(capsys):
    code, out, _ = run(capsys, "verify", "stability", "--cx", "(n-3)/2", "--imax", "10")
    assert code == 0 and json.loads(out)["report"]["c"] == 2
    code, _, err = run(capsys, "verify", "stability", "--cx", "(n-3)/3")
    assert code == 1 and json.loads(err)["error"] == "check-failed"


def test_verify_pentagon_flow_fails(capsys):
    code, out, _ = run(capsys, "verify", "flow", "--model", "pentagon")
    assert code == 1
    assert not json.loads(out)["pass"]


def test_verify_malformed_file(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    assert run(capsys, "verify", "homology", str(f))[0] == 2
    f.write_text(json.dumps({"maximal": [[0, 0]]}))
    code, _, err = run(capsys, "verify", "homology", str(f))
    assert code == 2 and json.loads(err)["error"] == "malformed-input"


def test_specseq_commands(capsys):
    code, out, _ = run(capsys, "specseq", "page", "--n", "3", "--qmax", "1")
    doc = json.loads(out)
    assert code == 0 and set(doc) >= {"n", "grid", "d1", "e2", "audits"}
    code, out, _ = run(capsys, "specseq", "mcg", "--imax", "1")
    assert json.loads(out)["ranges"]["1"]["beta"]["surjection_at_g"] == 3
    assert run(capsys, "specseq", "braid", "--n", "5", "--imax", "6")[0] == 0


def test_reports_are_deterministic(capsys):
    argv = ("verify", "flow", "--n", "2", "--bound", "2", "--words", "4")
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second and first[0] == 0


@pytest.mark.parametrize("argv", [("verify", "bad-simplex", "--n", "2", "--bound", "2", "--words", "4"),
                                  ("verify", "braid", "--n", "4")])
def test_named_checks_pass(capsys, argv):
    assert run(capsys, *argv)[0] == 0
