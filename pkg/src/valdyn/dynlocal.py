"""Action of a superattracting germ on local valuations.

A dominant germ f acts on the valuative tree by f_bullet(nu) =
f_*(nu)/c(f, nu) where c(f, nu) = min(nu(f1), nu(f2)).  The search walks
the tree from the root along SKP segments: on each segment the skewness of
the image is a piecewise-Moebius function of the last SKP value, whose fixed
point either is the eigenvaluation or dictates a one-stage key extension.
The asymptotic attraction rate c_infinity comes out as a quadratic integer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .errors import (
    AlgebraicExtensionNeeded,
    ContractedCurveError,
    FalsificationError,
    InconsistencyError,
    ValdynError,
)
from .numbers import QN, QuadraticInteger, spectral_radius_2x2
from .poly import (
    BiPoly,
    PlaneMap,
    jacobian_det,
    mult_sequence,
    multiplicity,
)
from .potentials import (
    PiecewiseLinear,
    admissible_floor,
    induced_moebius,
    moebius_fixed_points,
    potential_on_segment,
)
from .skpval import (
    INFINITY,
    Skp,
    Valuation,
    leading_terms,
    proportionality_ratio,
    skewness,
    skp_eval,
    skp_validate,
    thinness,
    valuation_to_json,
)

_X, _Y = BiPoly.var(0), BiPoly.var(1)


def exact_compose(P: BiPoly, f: PlaneMap) -> BiPoly:
    """P(f1, f2) without truncation."""
    return P.subs(f.f1, f.f2, None)


def _swap_poly(P: BiPoly) -> BiPoly:
    return BiPoly.make({(j, i): c for (i, j), c in P.terms.items()})


def swap_map(f: PlaneMap) -> PlaneMap:
    """Conjugate of f by the coordinate swap (x, y) -> (y, x)."""
    return PlaneMap(_swap_poly(f.f2), _swap_poly(f.f1), f.kind)


# -- basic action --------------------------------------------------------------

def attraction_rate(f: PlaneMap, nu: Valuation):
    """c(f, nu) = min(nu(f1), nu(f2))."""
    v1 = skp_eval(nu, f.f1)
    v2 = skp_eval(nu, f.f2)
    if v1 is INFINITY and v2 is INFINITY:
        raise ContractedCurveError("both components vanish along the valuation")
    if v1 is INFINITY:
        return v2
    if v2 is INFINITY:
        return v1
    return v1 if v1 < v2 else v2


class PushforwardEvaluator:
    """Callable presenting f_bullet(nu) through its values on polynomials."""

    def __init__(self, f: PlaneMap, nu: Valuation):
        self.f = f
        self.nu = nu
        self.c = attraction_rate(f, nu)

    def __call__(self, P: BiPoly):
        v = skp_eval(self.nu, exact_compose(P, self.f))
        if v is INFINITY:
            return INFINITY
        return v / self.c


def pushforward_eval(f: PlaneMap, nu: Valuation) -> PushforwardEvaluator:
    return PushforwardEvaluator(f, nu)


# -- sympy bridge --------------------------------------------------------------

_sx, _sy = sympy.symbols("x y")


def _to_sympy(P: BiPoly):
    return sympy.Add(*[sympy.Rational(c) * _sx ** i * _sy ** j
                       for (i, j), c in P.terms.items()])


def _from_sympy(expr) -> BiPoly:
    poly = sympy.Poly(sympy.expand(expr), _sx, _sy)
    terms = {}
    for (i, j), c in poly.terms():
        terms[(i, j)] = Fraction(sympy.Rational(c).p, sympy.Rational(c).q)
    return BiPoly.make(terms)


def _factor_germ(P: BiPoly):
    """Rational irreducible factors vanishing at the origin, with exponents.

    Returns (factors: list of (BiPoly, exponent), complete: bool) where
    complete is False when some non-coordinate factor cannot be certified
    irreducible as a germ (single Newton edge with coprime endpoints).
    """
    if P.is_zero():
        raise ValdynError("zero polynomial")
    _, facs = sympy.factor_list(_to_sympy(P), _sx, _sy)
    out, complete = [], True
    for fac, e in facs:
        Q = _from_sympy(fac)
        if (0, 0) in Q.terms:
            continue   # unit at the origin
        if Q.terms.get((1, 0)) is not None and len(Q.terms) == 1 or \
           Q.terms.get((0, 1)) is not None and len(Q.terms) == 1:
            out.append((Q, int(e)))
            continue
        if not _germ_irreducible_certified(Q):
            complete = False
        out.append((Q, int(e)))
    return out, complete


def _germ_irreducible_certified(Q: BiPoly) -> bool:
    if multiplicity(Q) == 1:
        return True
    from .poly import NewtonDiagram
    nd = NewtonDiagram.of(Q)
    verts = nd.vertices
    if len(verts) != 2:
        return False
    (i0, j0), (i1, j1) = verts
    from math import gcd
    return gcd(abs(i1 - i0), abs(j1 - j0)) == 1 and \
        min(i0, i1) == 0 and min(j0, j1) == 0


def contracted_curves(f: PlaneMap):
    """Irreducible germ factors common to both components, plus completeness."""
    if not f.is_dominant():
        raise ValdynError("map must be dominant")
    g = sympy.gcd(_to_sympy(f.f1), _to_sympy(f.f2))
    if g.is_number:
        return [], True
    facs, complete = _factor_germ(_from_sympy(g))
    return [phi for phi, _ in facs], complete


# -- critical tree ends --------------------------------------------------------

def _intersection_at_origin(phi: BiPoly, psi: BiPoly):
    """(phi . psi)_0, with a completeness caveat for off-origin overlap."""
    if phi == psi:
        return None, True   # infinite
    sp, sq = _to_sympy(phi), _to_sympy(psi)
    complete = True
    if psi == _X or phi == _X:
        other = sq if phi == _X else sp
        spec = sympy.Poly(other.subs(_sx, 0), _sy)
        return _ord_of_poly(spec), True
    if psi == _Y or phi == _Y:
        other = sq if phi == _Y else sp
        spec = sympy.Poly(other.subs(_sy, 0), _sx)
        return _ord_of_poly(spec), True
    res = sympy.resultant(sp, sq, _sy)
    r = sympy.Poly(res, _sx)
    # overlap on {x = 0} away from the origin inflates the order
    a = sympy.Poly(sp.subs(_sx, 0), _sy)
    b = sympy.Poly(sq.subs(_sx, 0), _sy)
    stripped = sympy.gcd(a.as_expr() / _sy ** _ord_of_poly(a),
                         b.as_expr() / _sy ** _ord_of_poly(b))
    if not sympy.simplify(stripped).is_number:
        complete = False
    return _ord_of_poly(r), complete


def _ord_of_poly(p) -> int:
    if p.is_zero:
        raise ValdynError("unexpected identically-zero specialization")
    return min(sum(m) for m in p.monoms())


def _segment_potential_by_intersections(phi: BiPoly, P: BiPoly):
    """s -> nu_{phi,s}(P) on [1, inf), via the infimum formula.

    nu_{phi,s}(psi) = m(psi) * min(s, (phi.psi)_0/(m(phi) m(psi))) for each
    irreducible factor psi of P; the factor phi itself contributes slope
    m(phi) * s.  Returns (PiecewiseLinear, complete).
    """
    facs, complete = _factor_germ(P)
    m_phi = multiplicity(phi)
    total = None
    base = multiplicity(P) - sum(e * multiplicity(psi) for psi, e in facs)
    if base:
        raise InconsistencyError("factor multiplicities do not add up")
    for psi, e in facs:
        inter, ok = _intersection_at_origin(phi, psi)
        complete = complete and ok
        m_psi = multiplicity(psi)
        if inter is None:
            piece = PiecewiseLinear.line(0, e * m_psi, 1, INFINITY)
        else:
            cap = Fraction(inter, m_phi * m_psi)
            piece = PiecewiseLinear.envelope(
                [(Fraction(0), Fraction(1)), (cap, Fraction(0))],
                1, INFINITY).scale(e * m_psi)
        total = piece if total is None else total + piece
    if total is None:
        raise ContractedCurveError("no factor of P passes through the origin")
    return total, complete


def pl_crossings(pl1: PiecewiseLinear, pl2: PiecewiseLinear):
    """Parameters where pl1 = pl2, excluding intervals of coincidence."""
    breaks = pl1._merged_breaks(pl2)
    out = []
    for i in range(len(breaks) - 1):
        a, b = breaks[i], breaks[i + 1]
        _, (c1, s1) = pl1.piece_at_open(a)
        _, (c2, s2) = pl2.piece_at_open(a)
        if (c1, s1) == (c2, s2):
            continue
        if s1 == s2:
            continue
        t = QN.of(Fraction(c2 - c1, s1 - s2))
        if (t > a or t == a) and (b is INFINITY or t < b or t == b):
            if not any(t == u for u in out):
                out.append(t)
    return out


def critical_tree_ends(f: PlaneMap):
    """Maximal points of the tree where c(f, .) is not locally constant.

    Returns (ends, complete).  Each end is a dict with kind
    'contracted-curve' (field phi) or 'preimage-of-root' (fields segment,
    skewness, valuation when representable, verified).
    """
    if not f.is_dominant():
        raise ValdynError("map must be dominant")
    curves, complete = contracted_curves(f)
    ends = [{"kind": "contracted-curve", "phi": phi} for phi in curves]
    product = f.f1 * f.f2
    facs, ok = _factor_germ(product)
    complete = complete and ok
    seen = set()
    for phi, _ in facs:
        if phi in seen:
            continue
        seen.add(phi)
        if phi == _X:
            pot1 = _coordinate_segment_potential(f.f1, swapped=True)
            pot2 = _coordinate_segment_potential(f.f2, swapped=True)
        elif phi == _Y:
            pot1 = _coordinate_segment_potential(f.f1, swapped=False)
            pot2 = _coordinate_segment_potential(f.f2, swapped=False)
        else:
            pot1, ok1 = _segment_potential_by_intersections(phi, f.f1)
            pot2, ok2 = _segment_potential_by_intersections(phi, f.f2)
            complete = complete and ok1 and ok2
        for s in pl_crossings(pot1, pot2):
            if not s > 1:
                continue
            entry = {"kind": "preimage-of-root", "segment": phi,
                     "skewness": s, "valuation": None, "verified": False}
            if phi == _X:
                entry["valuation"] = Valuation.monomial(s, 1)
                entry["verified"] = _image_is_root(f, s, swapped=True)
            elif phi == _Y:
                entry["valuation"] = Valuation.monomial(1, s)
                entry["verified"] = _image_is_root(f, s, swapped=False)
            if entry["verified"] or entry["valuation"] is None:
                ends.append(entry)
    return ends, complete


def _coordinate_segment_potential(P: BiPoly, swapped: bool) -> PiecewiseLinear:
    """s -> Monomial(s,1)(P) (swapped) or t -> Monomial(1,t)(P)."""
    Q = _swap_poly(P) if swapped else P
    return PiecewiseLinear.envelope(
        [(Fraction(i), Fraction(j)) for (i, j) in Q.terms], 1, INFINITY)


def _image_is_root(f: PlaneMap, s, swapped: bool) -> bool:
    """Both coordinate values equal and leading forms non-proportional."""
    g = PlaneMap(_swap_poly(f.f1), _swap_poly(f.f2), f.kind) if swapped else f
    nu = Valuation.monomial(1, s)
    v1, v2 = skp_eval(nu, g.f1), skp_eval(nu, g.f2)
    if v1 != v2:
        return False
    _, l1 = leading_terms(nu, g.f1)
    _, l2 = leading_terms(nu, g.f2)
    return proportionality_ratio(l1, l2) is None


# -- eigenvaluation search -----------------------------------------------------

@dataclass
class EigenReport:
    eigen: Valuation
    rate: QuadraticInteger
    type: str            # divisorial | irrational | curve |
                         # infinitely-singular-truncated
    normal_form: str     # type-i .. type-iv
    matrix: tuple = None
    verified_to_degree: int = 0
    involutive: bool = False
    swapped: bool = False
    superattracting: bool = True
    bracket: tuple = None
    walk: tuple = ()
    bounds: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "eigen": valuation_to_json(self.eigen),
            "rate": self.rate.to_json() if self.rate else None,
            "rate_str": str(self.rate) if self.rate else None,
            "type": self.type,
            "normal_form": self.normal_form,
            "matrix": list(self.matrix) if self.matrix else None,
            "verified_to_degree": self.verified_to_degree,
            "involutive": self.involutive,
            "swapped": self.swapped,
            "superattracting": self.superattracting,
            "bracket": [str(b) for b in self.bracket] if self.bracket else None,
            "walk": list(self.walk),
            "bounds": self.bounds,
        }


def verify_fixed(f: PlaneMap, nu: Valuation, test_degree: int) -> bool:
    """f_bullet(nu) agrees with nu on all monomials up to test_degree."""
    e = pushforward_eval(f, nu)
    for i in range(test_degree + 1):
        for j in range(test_degree + 1 - i):
            if i == j == 0:
                continue
            P = BiPoly.monomial(i, j)
            if e(P) != skp_eval(nu, P):
                return False
    if nu.kind == "skp":
        for key in nu.skp.keys:
            if e(key) != skp_eval(nu, key):
                return False
    return True


def _moebius_matrix(piece) -> tuple:
    """Normal-form matrix rows for a Moebius piece (a+bt)/(c+dt)."""
    a, b, c, d = piece
    from math import gcd, lcm
    m = lcm(a.denominator, b.denominator, c.denominator, d.denominator)
    ints = [int(c * m), int(d * m), int(a * m), int(b * m)]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g:
        ints = [v // g for v in ints]
    if all(v <= 0 for v in ints):
        ints = [-v for v in ints]
    return tuple(ints)


def _companion_matrix(rate: QuadraticInteger) -> tuple:
    return (0, -rate.q, 1, -rate.p)


def _prefix_with_placeholder(chart, keys, values):
    # the placeholder is ignored by the symbolic evaluator; any admissible
    # rational keeps Skp construction happy
    return Skp(chart, keys, values)


def eigenvaluation_search(f: PlaneMap, max_depth: int = 6,
                          test_degree: int = None) -> EigenReport:
    if f.kind != "local-germ":
        raise ValdynError("local search needs a local germ")
    if not f.is_dominant():
        raise ValdynError("map must be dominant")
    if test_degree is None:
        test_degree = 2 * max(f.f1.degree(), f.f2.degree()) + 2
    c1 = min(multiplicity(f.f1), multiplicity(f.f2))
    if c1 < 2:
        return EigenReport(Valuation.nu_m(), None, "not-superattracting",
                           "none", superattracting=False,
                           walk=("root: c(f) < 2",))

    walk = []
    m1, m2 = multiplicity(f.f1), multiplicity(f.f2)
    swapped = False
    g = f
    if m1 > m2:
        swapped = True
        g = swap_map(f)
        m1, m2 = m2, m1
        walk.append("swap coordinates (x-direction image)")

    if m1 == m2:
        h1 = g.f1.homogeneous_part(m1)
        h2 = g.f2.homogeneous_part(m1)
        lam = _poly_ratio(h2, h1)
        if lam is None:
            walk.append("root fixed: leading forms independent")
            rep = EigenReport(Valuation.nu_m(),
                              QuadraticInteger.from_value(QN.of(m1)),
                              "divisorial", "type-i", swapped=swapped,
                              walk=tuple(walk))
            rep.verified_to_degree = test_degree if \
                verify_fixed(g, rep.eigen, test_degree) else 0
            if rep.verified_to_degree == 0:
                raise InconsistencyError("root reported fixed but failed "
                                         "verification")
            return rep
        walk.append(f"root image in direction y - ({lam})x")
        key2 = _Y - BiPoly.const(lam) * _X
        keys = (_X, _Y, key2)
        values = (QN.of(1), QN.of(1), QN.of(2))   # placeholder last value
    else:
        walk.append("root image in the y-direction")
        keys = (_X, _Y)
        values = (QN.of(1), QN.of(2))             # placeholder last value

    return _walk_segments(f, g, keys, values, swapped, max_depth,
                          test_degree, walk)


def _poly_ratio(h2: BiPoly, h1: BiPoly):
    """lam with h2 = lam * h1 (lam = 0 when h2 = 0); None if independent."""
    if h2.is_zero():
        return Fraction(0)
    if h1.is_zero():
        raise InconsistencyError("swapped walk should have removed this case")
    if set(h2.terms) != set(h1.terms):
        return None
    e0 = next(iter(h1.terms))
    lam = h2.terms[e0] / h1.terms[e0]
    for e, c in h1.terms.items():
        if h2.terms[e] != lam * c:
            return None
    return lam


def _walk_segments(f_orig, g, keys, values, swapped, max_depth,
                   test_degree, walk):
    depth = 0
    while True:
        prefix = _prefix_with_placeholder("local", keys, values)
        floor = admissible_floor(prefix)
        pot1 = potential_on_segment(prefix, g.f1, floor, INFINITY)
        pot2 = potential_on_segment(prefix, g.f2, floor, INFINITY)
        cpot = pot1.min_with(pot2)
        Uk = keys[-1]
        Uk_f = exact_compose(Uk, g)
        num = potential_on_segment(prefix, Uk_f, floor, INFINITY)
        T = induced_moebius(num, cpot, 1)
        fps = moebius_fixed_points(T)
        cand = _choose_fixed_point(fps, floor)
        if cand is None:
            return _curve_end_report(g, keys, values, cpot, Uk, Uk_f,
                                     swapped, walk, test_degree)
        t_star, piece_idx, involutive = cand
        piece = T.pieces[piece_idx]
        nu = Valuation.from_skp(
            Skp("local", keys, values[:-1] + (t_star,)))
        c_star = cpot(t_star)
        if not t_star.is_rational:
            walk.append(f"irrational fixed point t = {t_star} at depth {depth}")
            return _finish_irrational(g, nu, c_star, piece, involutive,
                                      swapped, walk, test_degree)
        walk.append(f"rational fixed point t = {t_star} at depth {depth}")
        theta = _extension_theta(g, nu)
        if theta is None:
            # no tangent direction absorbs the image: genuinely fixed
            if not verify_fixed(g, nu, test_degree):
                raise InconsistencyError(
                    "leading forms certify fixedness but the finite "
                    "verification disagrees")
            if involutive:
                return _finish_irrational(g, nu, c_star, piece, True,
                                          swapped, walk, test_degree)
            rate = QuadraticInteger.from_value(c_star)
            return EigenReport(nu, rate, "divisorial", "type-i",
                               verified_to_degree=test_degree,
                               involutive=involutive, swapped=swapped,
                               walk=tuple(walk))
        data = skp_validate(nu.skp)
        nk = data.n[-1]
        digits = data.m[-1]
        newkey = keys[-1] ** nk
        mono = BiPoly.const(1)
        for l, ml in enumerate(digits):
            if ml:
                mono = mono * keys[l] ** ml
        newkey = newkey - BiPoly.const(theta) * mono
        walk.append(f"extend key with theta = {theta} at depth {depth}")
        keys = keys + (newkey,)
        values = values[:-1] + (t_star, QN.of(nk) * t_star + 1)
        depth += 1
        if depth >= max_depth:
            return _truncated_report(g, keys, values, swapped, walk,
                                     test_degree)


def _choose_fixed_point(fps, floor):
    best = None
    for fp in fps:
        if fp.get("everywhere_fixed"):
            # identity piece: any interior rational point is fixed
            entry = (QN.of(floor) + 1, fp["piece"], True)
            if best is None:
                best = entry
            continue
        t = fp["t"]
        if not t > floor:
            continue
        entry = (t, fp["piece"], fp["involutive"])
        if fp["attracting"]:
            return entry
        if best is None:
            best = entry
    return best


def _finish_irrational(g, nu, c_star, piece, involutive, swapped, walk,
                       test_degree):
    verified = verify_fixed(g, nu, test_degree)
    if not verified:
        raise InconsistencyError("irrational fixed point failed verification")
    rate = QuadraticInteger.from_value(c_star)
    matrix = _moebius_matrix(piece)
    if any(v < 0 for v in matrix):
        matrix = _companion_matrix(rate)
    if not involutive:
        sr = spectral_radius_2x2(*matrix)
        if sr.value != rate.value:
            matrix = _companion_matrix(rate)
    return EigenReport(nu, rate, "irrational", "type-ii", matrix=matrix,
                       verified_to_degree=test_degree, involutive=involutive,
                       swapped=swapped, walk=tuple(walk))


def _curve_end_report(g, keys, values, cpot, Uk, Uk_f, swapped, walk,
                      test_degree):
    from .skpval import expansion_coeffs
    rem = expansion_coeffs(Uk_f, Uk)
    invariant = bool(rem) and rem[0].is_zero()
    if not invariant:
        raise InconsistencyError(
            "no fixed point on the segment and the end curve is not invariant")
    c_end, s_end = cpot.pieces[-1]
    if s_end != 0:
        raise ContractedCurveError(
            "the invariant curve is contracted; rate diverges along the leg")
    walk.append(f"segment exits through the invariant curve {Uk.render()}")
    rate = QuadraticInteger.from_value(QN.of(c_end))
    nu = Valuation.from_skp(
        Skp("local", keys, values[:-1] + (values[-1] + 1,)), truncated=False)
    return EigenReport(nu, rate, "curve", "type-iii",
                       verified_to_degree=0, swapped=swapped,
                       walk=tuple(walk + ["curve end; eigen shown as a "
                                          "finite proxy on the leg"]))


def _truncated_report(g, keys, values, swapped, walk, test_degree):
    nu = Valuation.from_skp(Skp("local", keys, values), truncated=True)
    c_here = attraction_rate(g, nu)
    rate = None
    if c_here.is_rational and c_here.as_rational().denominator == 1:
        rate = QuadraticInteger.from_value(c_here)
    floor = values[-2]
    return EigenReport(nu, rate, "infinitely-singular-truncated", "type-iv",
                       verified_to_degree=0, swapped=swapped,
                       bracket=(floor, values[-1]),
                       walk=tuple(walk + ["max depth reached; truncated"]))


def _extension_theta(g, nu: Valuation):
    """theta for the next key, from graded leading-form proportionality."""
    skp = nu.skp
    data = skp_validate(skp)
    nk = data.n[-1]
    digits = data.m[-1]
    Uk_f = exact_compose(skp.keys[-1], g)
    A = Uk_f ** nk
    B = exact_compose(BiPoly.var(0), g) ** digits[0]
    for l in range(1, len(digits)):
        if digits[l]:
            B = B * exact_compose(skp.keys[l], g) ** digits[l]
    vA, la = leading_terms(nu, A)
    vB, lb = leading_terms(nu, B)
    if vA != vB:
        return None
    theta = proportionality_ratio(la, lb)
    if theta is None:
        return None
    if isinstance(theta, Fraction):
        return theta
    raise AlgebraicExtensionNeeded(f"theta = {theta} is not rational")


# -- verification and identities ----------------------------------------------

def verify_bounds(f: PlaneMap, report: EigenReport, n_max: int) -> dict:
    """Check delta * c_inf^n <= c(f^n) <= c_inf^n with delta = 1/alpha(eigen)."""
    if report.rate is None:
        raise ValdynError("report carries no rate to verify")
    cs = mult_sequence(f, n_max)
    c_inf = report.rate.value
    alpha_star = skewness(report.eigen)
    lenient = report.type == "infinitely-singular-truncated"
    rows = []
    min_ratio = None
    power = QN.of(1)
    for n, cn in enumerate(cs, start=1):
        power = power * c_inf
        upper_ok = QN.of(cn) <= power
        lower_ok = QN.of(cn) * alpha_star >= power
        if not upper_ok:
            raise FalsificationError(f"c(f^{n}) = {cn} exceeds c_inf^{n}")
        if not lower_ok and not lenient:
            raise FalsificationError(
                f"c(f^{n}) = {cn} below c_inf^{n}/alpha = {power}/{alpha_star}")
        ratio = float(cn) / float(power)
        rows.append({"n": n, "c_n": cn, "upper_ok": upper_ok,
                     "lower_ok": lower_ok, "ratio": ratio})
        if min_ratio is None or ratio < min_ratio:
            min_ratio = ratio
    return {"delta": float(1 / alpha_star), "min_ratio": min_ratio,
            "rows": rows, "lenient": lenient}


def jacobian_identity_check(f: PlaneMap, nu: Valuation) -> dict:
    """c(f,nu) * A(f_bullet nu) = A(nu) + nu(Jf), with a monomial image."""
    c = attraction_rate(f, nu)
    Jf = jacobian_det(f)
    vJ = skp_eval(nu, Jf)
    if vJ is INFINITY:
        return {"checked": False, "reason": "Jacobian vanishes along nu"}
    e = pushforward_eval(f, nu)
    ex, ey = e(_X), e(_Y)
    if ex is INFINITY or ey is INFINITY:
        return {"checked": False, "reason": "image is a curve valuation"}
    image = Valuation.monomial(ex, ey)
    # the reconstruction is only valid if the image really is monomial
    for i in range(4):
        for j in range(4 - i):
            if i == j == 0:
                continue
            P = BiPoly.monomial(i, j)
            if e(P) != skp_eval(image, P):
                return {"checked": False,
                        "reason": "image is not a monomial valuation"}
    lhs = c * thinness(image)
    rhs = thinness(nu) + vJ
    if lhs != rhs:
        raise FalsificationError(
            f"Jacobian identity failed: {lhs} != {rhs}")
    return {"checked": True, "lhs": lhs, "rhs": rhs,
            "c": c, "A_image": thinness(image), "A_nu": thinness(nu),
            "nu_Jf": vJ}


def classify_normal_form(report: EigenReport) -> dict:
    """Normal-form family and the consistency of the rate formula."""
    t = report.type
    if t == "divisorial":
        ok = report.rate.degree == 1
        return {"family": "type-i", "rate_formula_ok": ok}
    if t == "irrational":
        if report.involutive:
            return {"family": "type-ii", "rate_formula_ok": True,
                    "involutive": True}
        sr = spectral_radius_2x2(*report.matrix)
        return {"family": "type-ii",
                "rate_formula_ok": sr.value == report.rate.value,
                "matrix": report.matrix}
    if t == "curve":
        return {"family": "type-iii",
                "rate_formula_ok": report.rate.degree == 1}
    if t == "infinitely-singular-truncated":
        ok = report.rate is None or report.rate.degree == 1
        return {"family": "type-iv", "rate_formula_ok": ok}
    raise InconsistencyError(f"unclassifiable report type {t!r}")
