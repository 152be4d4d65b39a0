import json

import pytest

import pksym


def test_builtins_load():
    names = pksym.builtin_names()
    assert "susy_oscillator" in names and "jc_generalized" in names
    m = pksym.load("jc")
    assert m.dim == 2
    assert m.generator_names == ["X1", "X2", "X3", "X4", "X5", "X6"]
    assert m.has_ansatz


def test_missing_model_raises():
    with pytest.raises(Exception):
        pksym.load("missing_model")


def test_canonical_and_zero():
    assert pksym.canonical("x + x") == "2*x"
    assert pksym.is_zero("sin(x)^2 + cos(x)^2 - 1")
    assert not pksym.is_zero("sin(x)^2 - cos(x)^2")


def test_bracket():
    m = pksym.load("susy_oscillator")
    r = pksym.bracket(m, "Q+", "Q-")
    assert r["kind"] == "anticommutator"
    assert r["text"] == "anticommutator = H0 - w*Y"
    assert r["coefficients"] == {"H0": "1", "Y": "-w"}
    assert pksym.bracket(m, "X6", "X6")["text"] == "commutator = 0"
    assert not pksym.bracket(pksym.load("jc"), "Qd", "Qd")["in_span"]


def test_verify_suites():
    m = pksym.load("susy_oscillator")
    r = pksym.verify(m, "algebra")
    assert r["passed"]
    report = json.loads(r["json"])
    assert report["seed"] == pksym.DEFAULT_SEED
    assert all(s["pass"] for s in report["sections"])
    assert pksym.verify(m, "algebra")["json"] == r["json"]
    with pytest.raises(ValueError):
        pksym.verify(m, "nonsense")


def test_alpha_beta_shift_flag():
    g = pksym.load("jc_generalized")
    assert pksym.verify(g, "supercharges")["passed"]
    shifted = pksym.verify(g, "supercharges", alpha_beta_shift=True)
    assert "FAIL QQ_anti:" in shifted["text"]
    assert pksym.check_relation(g, "QQ_anti_corrected")


def test_tables_relations_ansatz():
    m = pksym.load("susy_oscillator")
    t = pksym.verify_table(m, "bosonic")
    assert t["passed"] and t["matches"] == 36
    assert pksym.check_relation(m, "Qp_nilpotent")
    assert pksym.check_ansatz(m)
    d = pksym.derive(m)
    assert d["count"] > 10
    assert "dxi1/du1 = 0" in d["findings"]


def test_numeric():
    m = pksym.load("susy_oscillator")
    assert pksym.generator_residual(m, "X3", 0) <= 1e-9
    rows = json.loads(pksym.finite_suite(m))["finite"]
    listed = [r for r in rows if not r["printed"]]
    assert listed and all(r["pass"] for r in listed)


def test_export_round_trip(tmp_path):
    m = pksym.jc_generalized("alpha", "beta", "pi/4")
    path = tmp_path / "model.json"
    pksym.save(m, str(path))
    back = pksym.load(str(path))
    assert back.generator_names == m.generator_names
    assert json.loads(pksym.export(back))["name"] == json.loads(m.document)["name"]
