import json

import pytest

from valdyn.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_local_human(capsys):
    code, out, _ = run(capsys, "local", "--map", "(x^2*y^3+x^7, x^7)")
    assert code == 0
    assert "1 + sqrt(22) (minpoly: X^2 - 2X - 21)" in out
    assert "(2, 3, 7, 0)" in out


def test_local_json_round_trip(capsys):
    code, out, _ = run(capsys, "local", "--map", "(x^2*y^3+x^7, x^7)",
                       "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["rate_str"] == "1 + sqrt(22) (minpoly: X^2 - 2X - 21)"
    assert doc["matrix"] == [2, 3, 7, 0]
    # stable serialization: parse and re-emit is byte-identical
    assert json.dumps(doc, sort_keys=True) + "\n" == out


def test_local_with_bounds(capsys):
    code, out, _ = run(capsys, "local", "--map", "(x^2, y^2)", "--n", "3")
    assert code == 0
    assert "bounds verified for n <= 3" in out


def test_affine_json(capsys):
    code, out, _ = run(capsys, "affine", "--map", "(Y, X*Y)", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["dichotomy"] == "bounded-ratio"
    assert doc["matrix"] == [0, 1, 1, 1]
    assert json.dumps(doc, sort_keys=True) + "\n" == out


def test_degseq(capsys):
    code, out, _ = run(capsys, "degseq", "--map", "(Y, X*Y)", "--n", "5")
    assert code == 0
    assert out.strip() == "2,3,5,8,13"


def test_multseq(capsys):
    code, out, _ = run(capsys, "multseq", "--map", "(x^2*y^3+x^7, x^7)",
                       "--n", "2")
    assert code == 0
    assert out.strip() == "5,31"


def test_skp_eval(capsys):
    code, out, _ = run(capsys, "skp-eval",
                       "--valuation", "monomial(1, 3/2)",
                       "--poly", "x^2*y^3 + x^7")
    assert code == 0
    assert "13/2" in out
    code, out, _ = run(capsys, "skp-eval", "--valuation=-deg",
                       "--poly", "X*Y - 1")
    assert code == 0
    assert "-2" in out


def test_quadra(capsys):
    code, out, _ = run(capsys, "quadra", "--matrix", "1,1,1,0",
                       "--floor", "10", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["p2"] * doc["q"] - doc["p"] * doc["q2"] == 1
    assert min(doc["q"], doc["q2"]) > 10


def test_certify_v1(capsys):
    code, out, _ = run(capsys, "certify-v1", "--valuation=-deg")
    assert code == 0
    assert "certified-in-V1" in out


def test_jacobian_check(capsys):
    code, out, _ = run(capsys, "jacobian-check", "--map", "(x^2, y^2)",
                       "--valuation", "monomial(1, 1)")
    assert code == 0
    assert "identity holds" in out
    code, out, _ = run(capsys, "jacobian-check", "--map", "(X^2, Y^2)",
                       "--valuation=-deg")
    assert code == 0
    assert "identity holds" in out


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "local", "--map", "(x^2,")
    assert code == 2
    assert "parse error" in err


def test_resource_error_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("VALDYN_TERM_BUDGET", "10")
    code, _, err = run(capsys, "degseq", "--map", "(X^2, (1+X)*Y^2)",
                       "--n", "6")
    assert code == 4
    assert "resource limit" in err


def test_quadra_bad_matrix(capsys):
    code, _, err = run(capsys, "quadra", "--matrix", "1,2,3")
    assert code == 2


def test_requires_subcommand(capsys):
    with pytest.raises(SystemExit):
        main([])
