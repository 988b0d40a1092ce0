import csv
import json

import numpy as np
import pytest

from mcx.cli import main
from mcx.numkernel import matrix_to_json


def mixed_json(d_entries, g_entries):
    return json.dumps({"d": len(d_entries), "g": len(g_entries),
                       "entries": [matrix_to_json(np.asarray(e, dtype=complex)) for e in d_entries + g_entries]})


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def report(text):
    rep = json.loads(text)
    assert rep["schema_version"] == "1.0"
    return rep


def test_mixed_maximal_unitary(capsys):
    U = np.array([[0, 1], [1, 0]])
    code, out, _ = run(["mixed", "maximal", "--in", mixed_json([U], [])], capsys)
    rep = report(out)
    assert code == 0 and rep["checks"][0]["status"] == "pass"


def test_mixed_maximal_contraction_fails(capsys):
    code, out, _ = run(["mixed", "maximal", "--in", mixed_json([0.5 * np.eye(2)], [])], capsys)
    assert code == 1 and report(out)["checks"][0]["status"] == "fail"


def test_mixed_dilate_and_witness(capsys):
    T = 0.5 * np.eye(2)
    X = np.diag([0.3, -0.2])
    for verb in ("dilate", "witness"):
        code, out, _ = run(["mixed", verb, "--in", mixed_json([T], [X])], capsys)
        assert code == 0, out
        assert report(out)["checks"][0]["status"] == "pass"


def test_kp_bound_and_radius(capsys):
    code, out, _ = run(["kp", "bound", "--p", "1.5", "--c", "0.01"], capsys)
    ev = report(out)["checks"][0]["evidence"]
    assert code == 0 and ev["M_bound"] == pytest.approx(14.8148, rel=1e-4)
    code, out, _ = run(["kp", "radius", "--p", "1.5", "--c", "0.6"], capsys)
    assert code == 1


def test_kp_curve_requires_kind(capsys):
    code, _, err = run(["kp", "curve"], capsys)
    assert code == 2 and "--radius" in err


def test_kp_curve_csv(tmp_path, capsys):
    code, _, _ = run(["kp", "curve", "--radius", "--bound", "--c-values", "0.01,0.001",
                      "--csv-dir", str(tmp_path)], capsys)
    assert code == 0
    rows = list(csv.reader(open(tmp_path / "kp_bound.csv")))
    assert rows[0] == ["c", "M_bound"] and len(rows) == 3
    assert float(rows[1][0]) == 0.01 and float(rows[2][1]) > float(rows[1][1])
    assert (tmp_path / "kp_radius.csv").exists()


def test_malformed_json_reports_location(capsys):
    code, _, err = run(["mixed", "member", "--in", '{"d": 1,'], capsys)
    assert code == 2 and "line 1" in err and "column" in err


def test_unknown_command_is_usage_error(capsys):
    assert main(["nonsense"]) == 2
    assert main(["range", "support", "--direction", "1,0"]) == 2


def test_schema_error_is_usage_error(capsys):
    bad = json.dumps({"d": 2, "g": 0, "entries": [matrix_to_json(np.eye(2, dtype=complex))]})
    code, out, err = run(["mixed", "member", "--in", bad], capsys)
    assert code == 2 and out == "" and "expected d + g = 2" in err


def test_domain_error_is_a_failed_check(capsys):
    code, out, _ = run(["mixed", "dilate", "--in", mixed_json([[[0.5]], [[0.5]]], [])], capsys)
    chk = report(out)["checks"][0]
    assert code == 1 and chk["status"] == "fail" and chk["evidence"]["error"] == "NoFiniteMaximalDilation"


def test_geom_classify(capsys):
    code, out, _ = run(["geom", "classify", "--body", '{"kind": "kp", "p": 1.5}', "--point=0,0",
                        "--direction=0,-1"], capsys)
    ev = report(out)["checks"][0]["evidence"]
    assert code == 0 and ev["chain_consistent"]


def test_range_commands(capsys):
    sx = {"rows": 2, "cols": 2, "data": [[0, 0], [1, 0], [1, 0], [0, 0]]}
    e22 = {"rows": 2, "cols": 2, "data": [[0, 0], [0, 0], [0, 0], [1, 0]]}
    tup = json.dumps({"entries": [sx, e22]})
    code, out, _ = run(["range", "paraboloid", "--tuple", tup, "--point=0,0", "--direction=0,-1"], capsys)
    assert code == 0 and report(out)["checks"][0]["evidence"]["M"] == pytest.approx(0.25)
    code, out, _ = run(["range", "support", "--tuple", tup, "--direction=0,1"], capsys)
    assert code == 0
    code, out, _ = run(["range", "refute", "--a", "0.2", "--beta", "0.16"], capsys)
    assert code == 0 and report(out)["checks"][0]["evidence"]["t"] == 0.5


def test_config_from_environment(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 11, "n_directions": 360}))
    monkeypatch.setenv("MCX_CONFIG", str(cfg))
    code, out, _ = run(["kp", "bound"], capsys)
    rep = report(out)
    assert rep["config"]["seed"] == 11 and rep["config"]["n_directions"] == 360
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["kp", "bound"]) == 2


@pytest.mark.slow
def test_reproduce_all_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    code_a = main(["reproduce-all", "--seed", "7", "--out", str(a), "--csv-dir", str(tmp_path / "csv")])
    json.loads(a.read_text())
    a.rename(b)
    main(["reproduce-all", "--seed", "7", "--out", str(a), "--csv-dir", str(tmp_path / "csv")])
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    failed = {c["name"] for c in rep["checks"] if c["status"] != "pass"}
    assert code_a == (0 if not failed else 1)
    assert {"kp_radius.csv", "kp_bound.csv", "subquadratic_p1.5.csv"} <= {p.name for p in (tmp_path / "csv").iterdir()}
