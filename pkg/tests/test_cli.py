"""Command-line front end: exit codes, JSON envelopes, determinism."""

import json

import pytest

from uniformizer.cli import main

PLACE_R2 = {
    "kind": "monomial",
    "base": {"field": "Q"},
    "x_weights": [[{"q": "1"}, {"q": "1", "d": 2}]],
}

PRES_F5 = {
    "kind": "discrete_series",
    "base": {"field": "Fp", "p": 5},
    "uniformizer": "t",
    "precision": 16,
    "generator": {"name": "z", "min_poly": "X^2 - 1 - t", "residue": 1},
}


def run(tmp_path, capsys, command, doc, *extra):
    path = tmp_path / "req.json"
    path.write_text(json.dumps(doc))
    code = main([command, "--input", str(path), *extra])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(tmp_path, capsys, command, doc, *extra):
    code, out, err = run(tmp_path, capsys, command, doc, *extra)
    assert code == 0, err
    env = json.loads(out)
    assert set(env) == {"command", "seed", "result"}
    assert env["command"] == command
    return env


def test_value_monomial(tmp_path, capsys):
    doc = {"place": PLACE_R2, "element": "x2/x1"}
    env = run_json(tmp_path, capsys, "value", doc)
    assert env["result"]["coordinates"] == ["-1", "1"]
    assert env["seed"] is None


def test_value_discrete_and_series_literal(tmp_path, capsys):
    doc = {"place": PRES_F5, "element": "z - 1"}
    env = run_json(tmp_path, capsys, "value", doc)
    assert env["result"] == {"value": 1}
    doc = {"place": PRES_F5, "element": "3*t^2 + O(t^5)"}
    env = run_json(tmp_path, capsys, "value", doc)
    assert env["result"] == {"value": 2}


def test_residue_discrete(tmp_path, capsys):
    doc = {"place": PRES_F5, "element": "(z*z - 1)/t"}
    env = run_json(tmp_path, capsys, "residue", doc)
    assert env["result"] == {"residue": "1"}


def test_residue_monomial(tmp_path, capsys):
    place = dict(PLACE_R2, tau=1)
    doc = {"place": place, "element": "(x1*y1 + x1)/x1"}
    env = run_json(tmp_path, capsys, "residue", doc)
    assert env["result"] == {"residue": "y1bar + 1"}


def test_perron(tmp_path, capsys):
    doc = {
        "order": [[{"q": "1"}, {"q": "1", "d": 2}]],
        "alphas": [["3", "-2"], [1, 0]],
    }
    env = run_json(tmp_path, capsys, "perron", doc)
    res = env["result"]
    assert res["valid"] is True
    assert len(res["basis"]) == 2
    for row in res["change"]:
        assert all(isinstance(x, int) for x in row)
    for row in res["coeffs"]:
        assert all(isinstance(x, int) and x >= 0 for x in row)


def test_perron_schema_path(tmp_path, capsys):
    doc = {"order": [[{"q": "1"}]], "alphas": [[1.5]]}
    code, _, err = run(tmp_path, capsys, "perron", doc)
    assert code == 4
    assert "alphas[0][0]" in err


def test_uniformize_monomial(tmp_path, capsys):
    doc = {"place": PLACE_R2, "zetas": ["x2/x1"]}
    env = run_json(tmp_path, capsys, "uniformize", doc)
    res = env["result"]
    assert res["report"]["passed"] is True
    assert res["system"]["fs"] == ["-t2 + X1"]
    assert ["x1", "t1"] in res["system"]["witnesses"]


def test_uniformize_rejects_series_place(tmp_path, capsys):
    doc = {"place": PRES_F5, "zetas": ["z"]}
    code, _, err = run(tmp_path, capsys, "uniformize", doc)
    assert code == 2
    assert "discrete-uniformize" in err


def test_discrete_uniformize_and_determinism(tmp_path, capsys):
    doc = {"presentation": PRES_F5, "zetas": ["z", "(z - 1)/t"]}
    code1, out1, _ = run(tmp_path, capsys, "discrete-uniformize", doc)
    code2, out2, _ = run(tmp_path, capsys, "discrete-uniformize", doc)
    assert code1 == code2 == 0
    assert out1 == out2  # byte-identical reruns
    res = json.loads(out1)["result"]
    assert res["report"]["passed"] is True
    assert res["system"]["coeff_table"] == []


def test_verify_round_trip(tmp_path, capsys):
    doc = {"presentation": PRES_F5, "zetas": ["z"]}
    env = run_json(tmp_path, capsys, "discrete-uniformize", doc)
    system = env["result"]["system"]
    env2 = run_json(tmp_path, capsys, "verify", {"system": system})
    assert env2["result"]["report"]["passed"] is True


def test_verify_reports_failure_with_exit_zero(tmp_path, capsys):
    system = {
        "place": {
            "kind": "monomial",
            "base": {"field": "Q"},
            "x_weights": [[{"q": "1"}]],
            "x_names": ["t"],
        },
        "tvars": ["t"],
        "etas": ["t^2"],
        "fs": ["X1 - t1^3"],
    }
    env = run_json(tmp_path, capsys, "verify", {"system": system})
    rep = env["result"]["report"]
    assert rep["passed"] is False
    assert rep["u2"]["passed"] is False


def test_compose_cli(tmp_path, capsys):
    from uniformizer.completion import uniformize_completion_algebraic
    from uniformizer.fields import GF
    from uniformizer.jsonio import system_to_json
    from uniformizer.polyfield import SparsePoly
    from uniformizer.surd import SurdScalar
    from uniformizer.uniformize import uniformize_abhyankar
    from uniformizer.valuation import MonomialPlace
    from uniformizer.valuegroup import GroupOrder

    F5 = GF(5)
    m = SparsePoly.make(F5, 2, [((0, 2), 1), ((1, 0), -1), ((0, 0), -1)])
    outer = uniformize_completion_algebraic(m, 1, 16)
    t_place = MonomialPlace(F5, GroupOrder(((SurdScalar.rational(1),),)), x_names=("t",))
    inner = uniformize_abhyankar(t_place, list(outer.coeff_table))
    doc = {"outer": system_to_json(outer), "inner": system_to_json(inner)}
    env = run_json(tmp_path, capsys, "compose", doc)
    assert env["result"]["report"]["passed"] is True


def test_report_both_place_kinds(tmp_path, capsys):
    env = run_json(tmp_path, capsys, "report", {"place": dict(PLACE_R2, tau=1)})
    assert env["result"] == {
        "transcendence_degree": 3,
        "rational_rank": 2,
        "residue_transcendence_degree": 1,
        "is_abhyankar": True,
    }
    env = run_json(tmp_path, capsys, "report", {"place": PRES_F5})
    assert env["result"]["rational_rank"] == 1


def test_exit_code_2_on_precondition(tmp_path, capsys):
    doc = {"place": PLACE_R2, "element": "0"}
    code, _, err = run(tmp_path, capsys, "value", doc)
    assert code == 2
    assert "error:" in err


def test_exit_code_3_on_insufficient_precision(tmp_path, capsys):
    doc = {"place": PRES_F5, "element": "z*z - 1 - t"}
    code, _, err = run(tmp_path, capsys, "value", doc)
    assert code == 3
    assert "error:" in err


def test_exit_code_4_on_bad_input(tmp_path, capsys):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    assert main(["value", "--input", str(path)]) == 4
    capsys.readouterr()

    code, _, err = run(tmp_path, capsys, "value", {"element": "x1"})
    assert code == 4 and "place" in err

    code, _, err = run(
        tmp_path, capsys, "value", {"place": PLACE_R2, "element": "x1 + ("}
    )
    assert code == 4 and "line 1" in err

    assert main(["value", "--input", str(tmp_path / "missing.json")]) == 4
    capsys.readouterr()


def test_schema_path_for_bad_weight(tmp_path, capsys):
    place = {
        "kind": "monomial",
        "base": {"field": "Q"},
        "x_weights": [[{"q": "1"}, {"q": "1", "d": 8}]],
    }
    code, _, err = run(tmp_path, capsys, "value", {"place": place, "element": "x1"})
    assert code == 4
    assert "place.x_weights[0][1].d" in err


def test_text_format_and_seed(tmp_path, capsys):
    doc = {"place": PRES_F5, "element": "z - 1"}
    code, out, _ = run(tmp_path, capsys, "value", doc, "--format", "text")
    assert code == 0 and out.strip() == "value = 1"
    env = run_json(tmp_path, capsys, "value", doc, "--seed", "42")
    assert env["seed"] == 42


def test_stdin_input(capsys, monkeypatch):
    import io

    doc = {"place": PRES_F5, "element": "z - 1"}
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(doc)))
    code = main(["value", "--input", "-"])
    out = capsys.readouterr().out
    assert code == 0
    assert json.loads(out)["result"]["value"] == 1


def test_precision_flag_reaches_the_place(tmp_path, capsys):
    doc = {"place": PRES_F5, "element": "z - 1"}
    code, _, err = run(tmp_path, capsys, "value", doc, "--precision", "2")
    assert code == 0  # order 1 is still visible at precision 2
    doc = {"place": PRES_F5, "element": "(z - 1 - 3*t)/t^2"}
    code, _, _ = run(tmp_path, capsys, "value", doc, "--precision", "16")
    assert code == 0
