import random
from fractions import Fraction

import pytest

from valdyn import (
    QN,
    Valuation,
    attraction_rate,
    contracted_curves,
    critical_tree_ends,
    eigenvaluation_search,
    jacobian_identity_check,
    pushforward_eval,
    spectral_radius_2x2,
    verify_bounds,
)
from valdyn import skp_eval
from valdyn.dynlocal import classify_normal_form
from valdyn.errors import FalsificationError, ValdynError
from valdyn.poly import BiPoly, parse_map, parse_poly

WORKED = parse_map("(x^2*y^3+x^7, x^7)", "local-germ")


def test_attraction_rate():
    assert attraction_rate(WORKED, Valuation.nu_m()) == 5
    assert attraction_rate(parse_map("(x^2, y^2)", "local-germ"),
                           Valuation.nu_m()) == 2
    assert attraction_rate(parse_map("(x^2*y, x*y^3)", "local-germ"),
                           Valuation.monomial(2, 1)) == 5


def test_pushforward_segment_formula():
    for t in (1, Fraction(4, 3), Fraction(5, 3)):
        e = pushforward_eval(WORKED, Valuation.monomial(1, t))
        assert e(BiPoly.var(1)) == Fraction(7, 1) / (2 + 3 * Fraction(t))


def test_pushforward_identity():
    f = parse_map("(x, y)", "local-germ")
    nu = Valuation.monomial(1, Fraction(3, 2))
    e = pushforward_eval(f, nu)
    for text in ("x", "y", "x*y + y^2", "x^3 + y^2"):
        P = parse_poly(text)
        assert e(P) == skp_eval(nu, P)


def test_pushforward_monomial_law():
    rng = random.Random(29)
    for _ in range(25):
        a, b, c, d = (rng.randint(0, 3) for _ in range(4))
        if a * d == b * c or min(a + b, c + d) == 0:
            continue
        f = parse_map(f"(x^{a}*y^{b}, x^{c}*y^{d})".replace("^0*", "^0*"),
                      "local-germ")
        s, t = Fraction(rng.randint(1, 5)), Fraction(rng.randint(1, 5))
        nu = Valuation.monomial(s, t)
        image = Valuation.monomial(a * nu.s + b * nu.t, c * nu.s + d * nu.t)
        e = pushforward_eval(f, nu)
        assert e(BiPoly.var(0)) == image.s
        assert e(BiPoly.var(1)) == image.t


def test_contracted_curves():
    curves, complete = contracted_curves(parse_map("(x^2*y, x*y^3)",
                                                   "local-germ"))
    assert complete
    assert set(curves) == {BiPoly.var(0), BiPoly.var(1)}
    curves2, _ = contracted_curves(WORKED)
    assert BiPoly.var(0) in curves2


def test_critical_tree_empty():
    ends, complete = critical_tree_ends(parse_map("(x^2, y^2)", "local-germ"))
    assert complete
    assert ends == []


def test_critical_tree_example():
    ends, complete = critical_tree_ends(parse_map("(x^2*y, x*y^3)",
                                                  "local-germ"))
    assert complete
    curves = {e["phi"] for e in ends if e["kind"] == "contracted-curve"}
    assert curves == {BiPoly.var(0), BiPoly.var(1)}
    pre = [e for e in ends if e["kind"] == "preimage-of-root"]
    assert len(pre) == 1
    assert pre[0]["valuation"] == Valuation.monomial(2, 1)
    assert pre[0]["verified"]
    assert len(ends) == 3


def test_search_fixed_root():
    r = eigenvaluation_search(parse_map("(x^2, y^2)", "local-germ"))
    assert r.eigen == Valuation.nu_m()
    assert r.rate.value == 2
    assert r.type == "divisorial"
    assert r.normal_form == "type-i"
    assert classify_normal_form(r)["rate_formula_ok"]


def test_search_worked_example():
    r = eigenvaluation_search(WORKED)
    t_star = (QN.sqrt_of(22) - 1) / 3
    # depth-1 skp on the coordinate keys, i.e. the monomial valuation nu_{1,t*}
    assert r.eigen.skp.keys == (BiPoly.var(0), BiPoly.var(1))
    assert r.eigen.skp.values == (QN.of(1), t_star)
    assert r.rate.value == QN.of(1) + QN.sqrt_of(22)
    assert str(r.rate) == "1 + sqrt(22) (minpoly: X^2 - 2X - 21)"
    assert r.type == "irrational"
    assert r.normal_form == "type-ii"
    assert r.matrix == (2, 3, 7, 0)
    assert classify_normal_form(r)["rate_formula_ok"]


def test_search_monomial_map():
    r = eigenvaluation_search(parse_map("(x^2*y, x*y^3)", "local-germ"))
    assert r.rate.value == spectral_radius_2x2(2, 1, 1, 3).value
    assert r.type == "irrational"


def test_search_nonsuperattracting():
    r = eigenvaluation_search(parse_map("(x^2, x*y + x^3)", "local-germ"))
    assert r.rate.value == 2 or not r.superattracting


def test_search_rejects_nondominant():
    with pytest.raises(ValdynError):
        eigenvaluation_search(parse_map("(x^2, x^2)", "local-germ"))


def test_verify_bounds():
    r = eigenvaluation_search(WORKED)
    b = verify_bounds(WORKED, r, 3)
    assert all(row["upper_ok"] and row["lower_ok"] for row in b["rows"])
    assert [row["c_n"] for row in b["rows"]] == [5, 31, 167]
    assert 0 < b["delta"] <= 1


def test_verify_bounds_catches_wrong_rate():
    from valdyn.numbers import QuadraticInteger
    r = eigenvaluation_search(parse_map("(x^2, y^2)", "local-germ"))
    r.rate = QuadraticInteger.from_value(QN.of(3))
    with pytest.raises(FalsificationError):
        verify_bounds(parse_map("(x^2, y^2)", "local-germ"), r, 3)


def test_jacobian_identity_examples():
    rep = jacobian_identity_check(parse_map("(x^2, y^2)", "local-germ"),
                                  Valuation.nu_m())
    assert rep["checked"] and rep["lhs"] == 4
    for a in (2, 3, 4):
        f = parse_map(f"(x^{a}, y^{a})", "local-germ")
        rep = jacobian_identity_check(f, Valuation.nu_m())
        assert rep["checked"] and rep["lhs"] == 2 * a
    rep = jacobian_identity_check(parse_map("(x^2*y, x*y^3)", "local-germ"),
                                  Valuation.nu_m())
    assert rep["checked"]
    assert rep["lhs"] == 7
    assert rep["c"] == 3
    assert rep["nu_Jf"] == 5
