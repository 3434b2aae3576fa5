import random
from fractions import Fraction

import pytest

from valdyn import BiPoly, NewtonDiagram, PlaneMap, multiplicity
from valdyn.errors import ParseError, ResourceLimitError
from valdyn.poly import (
    at_infinity_transform,
    compose,
    deg_sequence,
    from_infinity_transform,
    jacobian_det,
    mult_sequence,
    parse_map,
    parse_poly,
)


def rand_poly(rng, max_exp=5, max_terms=4, denoms=(1, 1, 1, 2, 3)):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        e = (rng.randint(0, max_exp), rng.randint(0, max_exp))
        terms[e] = Fraction(rng.randint(-3, 3) or 1, rng.choice(denoms))
    return BiPoly({e: c for e, c in terms.items() if c})


def test_parse_basic():
    p = parse_poly("3/2*x^2*y^3 + x - 1")
    assert p.terms[(2, 3)] == Fraction(3, 2)
    assert p.terms[(1, 0)] == 1
    assert p.terms[(0, 0)] == -1


def test_parse_rejects_garbage():
    with pytest.raises(ParseError):
        parse_poly("x^-1")
    with pytest.raises(ParseError):
        parse_poly("x + ")
    with pytest.raises(ParseError):
        parse_poly("z", ("x", "y"))


def test_render_parse_round_trip():
    rng = random.Random(11)
    for _ in range(50):
        p = rand_poly(rng)
        assert parse_poly(p.render()) == p


def test_arithmetic():
    x, y = BiPoly.var(0), BiPoly.var(1)
    assert (x + y) * (x - y) == x * x - y * y
    assert (x + y) ** 2 == x * x + 2 * x * y + y * y
    assert (x - x).is_zero()


def test_degree_and_multiplicity():
    p = parse_poly("x^2*y^3 + x^7")
    assert p.degree() == 7
    assert multiplicity(p) == 5
    assert multiplicity(parse_poly("1 + x")) == 0


def test_multiplicity_additive():
    rng = random.Random(5)
    for _ in range(60):
        p, q = rand_poly(rng), rand_poly(rng)
        assert multiplicity(p * q) == multiplicity(p) + multiplicity(q)


def test_subs_exact():
    p = parse_poly("x^2 + y")
    g1 = parse_poly("x + y")
    g2 = parse_poly("x*y")
    assert p.subs(g1, g2) == parse_poly("x^2 + 2*x*y + y^2 + x*y")


def test_truncated_subs_matches_exact():
    rng = random.Random(3)
    for _ in range(200):
        p = rand_poly(rng)
        g1 = rand_poly(rng, max_exp=3, max_terms=3, denoms=(1, 1, 2))
        g2 = rand_poly(rng, max_exp=3, max_terms=3, denoms=(1, 2))
        order = rng.randint(1, 25)
        exact = p.subs(g1, g2).truncate(order)
        trunc = p.subs(g1, g2, order)
        assert trunc == exact
        assert all(isinstance(c, Fraction) for c in trunc.terms.values())


def test_pow_trunc_matches_exact():
    rng = random.Random(9)
    for _ in range(200):
        p = rand_poly(rng, max_terms=3)
        n = rng.randint(0, 7)
        order = rng.randint(1, 30)
        assert p.pow_trunc(n, order) == (p ** n).truncate(order)


def test_mul_trunc_matches_exact():
    rng = random.Random(13)
    for _ in range(100):
        p, q = rand_poly(rng), rand_poly(rng)
        order = rng.randint(1, 20)
        assert p.mul_trunc(q, order) == (p * q).truncate(order)


def test_newton_diagram():
    nd = NewtonDiagram.of(parse_poly("x^2*y^3 + x^7"))
    assert nd.min_value(1, 1) == 5
    assert nd.min_value(1, Fraction(5, 3)) == 7
    assert nd.min_value(2, 1) == 7


def test_parse_map():
    f = parse_map("(x^2*y^3+x^7, x^7)", "local-germ")
    assert f.f1 == parse_poly("x^2*y^3+x^7")
    F = parse_map("(Y, X*Y)", "affine")
    assert F.f2 == parse_poly("X*Y", ("X", "Y"))
    with pytest.raises(ParseError):
        parse_map("(x, y", "local-germ")


def test_local_germ_must_fix_origin():
    from valdyn.errors import ValdynError
    with pytest.raises(ValdynError):
        parse_map("(x + 1, y)", "local-germ")


def test_jacobian_det():
    f = parse_map("(x^2, y^2)", "local-germ")
    assert jacobian_det(f) == parse_poly("4*x*y")
    g = parse_map("(x^2*y, x*y^3)", "local-germ")
    assert jacobian_det(g) == parse_poly("5*x^2*y^3")


def test_compose():
    f = parse_map("(x^2, y^2)", "local-germ")
    assert compose(f, f).f1 == parse_poly("x^4")
    g = parse_map("(x^2*y^3+x^7, x^7)", "local-germ")
    g2 = compose(g, g, order=40)
    assert multiplicity(g2.f1) == 31
    assert multiplicity(g2.f2) == 35


def test_mult_sequence():
    assert mult_sequence(parse_map("(x^2, y^2)", "local-germ"), 3) == [2, 4, 8]
    assert mult_sequence(parse_map("(x^2*y^3+x^7, x^7)", "local-germ"),
                         2) == [5, 31]
    assert mult_sequence(parse_map("(x^2*y, x*y^3)", "local-germ"),
                         2) == [3, 10]


def test_mult_sequence_supermultiplicative():
    cs = mult_sequence(parse_map("(x^2*y, x*y^3)", "local-germ"), 5)
    for m in range(1, len(cs)):
        for n in range(1, len(cs) - m + 1):
            assert cs[m + n - 1] >= cs[m - 1] * cs[n - 1]


def test_mult_sequence_ceiling():
    f = parse_map("(x^2*y^3+x^7, x^7)", "local-germ")
    with pytest.raises(ResourceLimitError):
        mult_sequence(f, 4, order_ceiling=32)


def test_deg_sequence():
    F = parse_map("(Y, X*Y)", "affine")
    assert deg_sequence(F, 5) == [2, 3, 5, 8, 13]
    G = parse_map("(X^2, Y^3)", "affine")
    assert deg_sequence(G, 3) == [3, 9, 27]


def test_deg_sequence_submultiplicative():
    F = parse_map("(X^2, (1+X)*Y^2)", "affine")
    ds = deg_sequence(F, 5)
    for m in range(1, len(ds)):
        for n in range(1, len(ds) - m + 1):
            assert ds[m + n - 1] <= ds[m - 1] * ds[n - 1]


def test_infinity_transform():
    rng = random.Random(21)
    for _ in range(40):
        p, q = rand_poly(rng), rand_poly(rng)
        tp = at_infinity_transform(p * q)
        assert tp == at_infinity_transform(p) * at_infinity_transform(q)
    p = parse_poly("x*y - 1")
    assert from_infinity_transform(at_infinity_transform(p), p.degree()) == p
