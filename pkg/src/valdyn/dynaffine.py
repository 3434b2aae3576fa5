"""Action of a dominant polynomial map of the affine plane on valuations
centered at infinity.

Valuations are normalized by value -1 on generic lines.  The degree factor
d(F, nu) = -min(nu(F*X), nu(F*Y), 0) plays the role the attraction rate plays
locally; the search walks chart segments at infinity with the same
piecewise-Moebius fixed-point machinery, and either produces an affine
eigenvaluation with the dynamical degree d_infinity, or lands on a rational
pencil valuation, which certifies the skew-product branch of the dichotomy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    AlgebraicExtensionNeeded,
    FalsificationError,
    InconsistencyError,
    ValdynError,
)
from .numbers import QN, QuadraticInteger, spectral_radius_2x2
from .poly import (
    BiPoly,
    PlaneMap,
    at_infinity_transform,
    deg_sequence,
    from_infinity_transform,
    jacobian_det,
)
from .potentials import (
    PiecewiseLinear,
    _symbolic_lines,
    admissible_floor,
    induced_moebius,
    moebius_fixed_points,
)
from .skpval import (
    INFINITY,
    Skp,
    Valuation,
    leading_terms,
    one_place_certify,
    proportionality_ratio,
    skewness,
    skp_validate,
    thinness,
    valuation_to_json,
)

_X, _Y = BiPoly.var(0), BiPoly.var(1)
_IDENTITY = PlaneMap(_X, _Y, "affine")
_SWAP = PlaneMap(_Y, _X, "affine")


@dataclass(frozen=True)
class AffineValuation:
    """A valuation centered at infinity, normalized by -1 on lines.

    `change` is an affine coordinate change applied to arguments before the
    chart SKP evaluates them; it reaches points of the line at infinity other
    than the chart origin.
    """

    kind: str               # "negdeg" | "at-infinity"
    skp: Skp = None
    change: PlaneMap = None
    truncated: bool = False

    @staticmethod
    def neg_deg() -> "AffineValuation":
        return AffineValuation("negdeg")

    @staticmethod
    def at_infinity(skp: Skp, change: PlaneMap = None,
                    truncated=False) -> "AffineValuation":
        if skp.chart != "infinity":
            raise ValdynError("chart SKP expected")
        skp_validate(skp)
        return AffineValuation("at-infinity", skp,
                               change or _IDENTITY, truncated)

    def value(self, P: BiPoly):
        from .skpval import affine_eval
        if self.kind == "negdeg":
            return QN.of(-P.degree()) if not P.is_zero() else INFINITY
        Q = P.subs(self.change.f1, self.change.f2, None)
        return affine_eval(Valuation.from_skp(self.skp), Q)

    def base_valuation(self) -> Valuation:
        if self.kind == "negdeg":
            return Valuation.neg_deg()
        return Valuation.from_skp(self.skp, truncated=self.truncated)

    def alpha(self) -> QN:
        return skewness(self.base_valuation())

    def thinness(self) -> QN:
        return thinness(self.base_valuation())

    def check_normalized(self) -> bool:
        vx, vy = self.value(_X), self.value(_Y)
        lo = vx if vx < vy else vy
        return lo == -1

    def render(self) -> str:
        if self.kind == "negdeg":
            return "-deg"
        s = self.skp.render()
        if self.change is not None and self.change != _IDENTITY:
            s += f" via {self.change.render(('X', 'Y'))}"
        return s + (" [truncated]" if self.truncated else "")

    __repr__ = render

    def to_json(self):
        if self.kind == "negdeg":
            return {"kind": "negdeg"}
        out = valuation_to_json(self.base_valuation())
        if self.change is not None and self.change != _IDENTITY:
            out["change"] = self.change.render(("X", "Y"))
        return out


def d_of(F: PlaneMap, nu: AffineValuation) -> QN:
    """d(F, nu) = -min(nu(F*X), nu(F*Y), 0); 0 means the image leaves infinity."""
    v1, v2 = nu.value(F.f1), nu.value(F.f2)
    m = QN.of(0)
    for v in (v1, v2):
        if v is not INFINITY and v < m:
            m = v
    return -m


class AffinePushforward:
    """Values of F_bullet(nu) = F_*(nu)/d(F, nu)."""

    def __init__(self, F: PlaneMap, nu: AffineValuation):
        self.F = F
        self.nu = nu
        self.d = d_of(F, nu)
        if not self.d > 0:
            raise ValdynError("d(F, nu) = 0: the image is not centered "
                              "at infinity")

    def __call__(self, P: BiPoly):
        v = self.nu.value(P.subs(self.F.f1, self.F.f2, None))
        if v is INFINITY:
            return INFINITY
        return v / self.d


def affine_pushforward_eval(F: PlaneMap, nu: AffineValuation):
    return AffinePushforward(F, nu)


def reconstruct_affine_image(F: PlaneMap, nu: AffineValuation,
                             test_degree: int = 6):
    """The image F_bullet(nu) as a chart-monomial valuation, when it is one."""
    e = affine_pushforward_eval(F, nu)
    ex, ey = e(_X), e(_Y)
    if ex == -1 and ey == -1:
        cand = AffineValuation.neg_deg()
    elif ex == -1 and ey > -1:
        cand = AffineValuation.at_infinity(
            Skp("infinity", (_X, _Y), (QN.of(1), ey + 1)))
    elif ey == -1 and ex > -1:
        cand = AffineValuation.at_infinity(
            Skp("infinity", (_X, _Y), (QN.of(1), ex + 1)), change=_SWAP)
    else:
        return None
    for i in range(test_degree + 1):
        for j in range(test_degree + 1 - i):
            if i == j == 0:
                continue
            P = BiPoly.monomial(i, j)
            if e(P) != cand.value(P):
                return None
    return cand


# -- V1 certificate ------------------------------------------------------------

def v1_certificate(nu: AffineValuation, sample_degree: int = 6) -> dict:
    """Finite certificate that nu lies in the invariant subtree V1."""
    if nu.kind == "negdeg":
        return {"status": "certified-in-V1", "thinness": QN.of(-2),
                "details": "root of V1"}
    rep = one_place_certify(nu.skp)
    A = nu.thinness()
    eval_ok = True
    worst = None
    for i in range(sample_degree + 1):
        for j in range(sample_degree + 1 - i):
            if i == j == 0:
                continue
            v = nu.value(BiPoly.monomial(i, j))
            if v > 0:
                eval_ok = False
                worst = (i, j, v)
    if A > 0 or not eval_ok:
        status = "certified-not"
    elif rep["certified"] and A <= 0 and eval_ok:
        status = "certified-in-V1"
    else:
        status = "inconclusive"
    return {"status": status, "thinness": A, "one_place": rep,
            "evaluations_nonpositive": eval_ok, "worst_monomial": worst}


# -- search --------------------------------------------------------------------

@dataclass
class AffineReport:
    eigen: AffineValuation
    rate: QuadraticInteger
    dichotomy: str        # bounded-ratio | skew-product
    type: str             # divisorial | irrational | curve |
                          # infinitely-singular-truncated | root
    normal_form: str
    matrix: tuple = None
    verified_to_degree: int = 0
    involutive: bool = False
    paper_open_case: bool = False
    expanding: bool = True
    walk: tuple = ()
    degseq: dict = field(default_factory=dict)
    v1: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "eigen": self.eigen.to_json() if self.eigen else None,
            "rate": self.rate.to_json() if self.rate else None,
            "rate_str": str(self.rate) if self.rate else None,
            "dichotomy": self.dichotomy,
            "type": self.type,
            "normal_form": self.normal_form,
            "matrix": list(self.matrix) if self.matrix else None,
            "verified_to_degree": self.verified_to_degree,
            "involutive": self.involutive,
            "paper_open_case": self.paper_open_case,
            "expanding": self.expanding,
            "walk": list(self.walk),
            "degseq": self.degseq,
            "v1": {k: str(v) for k, v in self.v1.items()}
            if self.v1 else {},
        }


def _top_ratio(F: PlaneMap, d: int):
    """lam with top(F2) = lam * top(F1) in degree d, or None."""
    h1 = F.f1.homogeneous_part(d)
    h2 = F.f2.homogeneous_part(d)
    if h2.is_zero():
        return Fraction(0)
    if h1.is_zero():
        raise InconsistencyError("degree bookkeeping error in the root test")
    if set(h2.terms) != set(h1.terms):
        return None
    e0 = next(iter(h1.terms))
    lam = h2.terms[e0] / h1.terms[e0]
    for e, c in h1.terms.items():
        if h2.terms[e] != lam * c:
            return None
    return lam


def _conjugate(F: PlaneMap, T: PlaneMap, Tinv: PlaneMap) -> PlaneMap:
    """T o F o T^{-1} for affine coordinate changes."""
    g1 = T.f1.subs(F.f1, F.f2, None).subs(Tinv.f1, Tinv.f2, None)
    g2 = T.f2.subs(F.f1, F.f2, None).subs(Tinv.f1, Tinv.f2, None)
    return PlaneMap(g1, g2, "affine")


def _affine_potential(prefix: Skp, Q: BiPoly, lo, hi) -> PiecewiseLinear:
    """t -> nu_t(Q) for the chart family with symbolic last value."""
    lines = _symbolic_lines(prefix, at_infinity_transform(Q))
    dq = Q.degree()
    return PiecewiseLinear.envelope([(c - dq, s) for c, s in lines], lo, hi)


def _negate_pl(pl: PiecewiseLinear) -> PiecewiseLinear:
    return PiecewiseLinear(pl.breaks, tuple((-c, -s) for c, s in pl.pieces))


def _first_zero(pl: PiecewiseLinear):
    """Smallest t with pl(t) = 0, right of the left endpoint, or None."""
    for i, (c, s) in enumerate(pl.pieces):
        if s == 0:
            if c == 0:
                return pl.breaks[i]
            continue
        t = QN.of(Fraction(-c, s))
        a, b = pl.breaks[i], pl.breaks[i + 1]
        if (t > a or t == a) and (b is INFINITY or t < b or t == b):
            return t
    return None


def affine_eigenvaluation_search(F: PlaneMap, max_depth: int = 6,
                                 test_degree: int = None) -> AffineReport:
    if F.kind != "affine":
        raise ValdynError("affine search needs an affine map")
    if not F.is_dominant():
        raise ValdynError("map must be dominant")
    if test_degree is None:
        test_degree = 2 * max(F.f1.degree(), F.f2.degree()) + 2
    d = max(F.f1.degree(), F.f2.degree())
    if d < 2:
        return AffineReport(AffineValuation.neg_deg(), None, "bounded-ratio",
                            "root", "none", expanding=False,
                            walk=("deg(F) < 2: no expansion",))

    walk = []
    G, change = F, _IDENTITY
    d1, d2 = F.f1.degree(), F.f2.degree()
    if d1 < d:
        G = _conjugate(F, _SWAP, _SWAP)
        change = _SWAP
        walk.append("swap chart (image elevates X)")
    elif d2 == d:
        lam = _top_ratio(F, d)
        if lam is None:
            walk.append("root fixed: top forms independent")
            rep = AffineReport(AffineValuation.neg_deg(),
                               QuadraticInteger.from_value(QN.of(d)),
                               "bounded-ratio", "root", "type-i",
                               walk=tuple(walk))
            rep.verified_to_degree = test_degree if _affine_verify_fixed(
                F, rep.eigen, test_degree) else 0
            if rep.verified_to_degree == 0:
                raise InconsistencyError("root reported fixed but failed "
                                         "verification")
            return rep
        shear = PlaneMap(_X, _Y - BiPoly.const(lam) * _X, "affine")
        shear_inv = PlaneMap(_X, _Y + BiPoly.const(lam) * _X, "affine")
        G = _conjugate(F, shear, shear_inv)
        change = shear_inv
        walk.append(f"shear chart: image elevates Y - ({lam})X")
    else:
        walk.append("identity chart (image elevates Y)")

    keys = (BiPoly.var(0), BiPoly.var(1))
    values = (QN.of(1), QN.of(1))   # placeholder last value
    return _affine_walk(F, G, change, keys, values, max_depth,
                        test_degree, walk)


def _chart_valuation(keys, values) -> AffineValuation:
    return AffineValuation.at_infinity(Skp("infinity", keys, values))


def _affine_verify_fixed(G: PlaneMap, nu: AffineValuation,
                         test_degree: int) -> bool:
    e = affine_pushforward_eval(G, nu)
    for i in range(test_degree + 1):
        for j in range(test_degree + 1 - i):
            if i == j == 0:
                continue
            P = BiPoly.monomial(i, j)
            if e(P) != nu.value(P):
                return False
    if nu.kind == "at-infinity":
        for k in nu.skp.keys[1:]:
            Pk = from_infinity_transform(k, k.degree())
            if e(Pk) != nu.value(Pk):
                return False
    return True


def _affine_walk(F_orig, G, change, keys, values, max_depth, test_degree,
                 walk):
    depth = 0
    while True:
        prefix = Skp("infinity", keys, values)
        floor = admissible_floor(prefix)
        pot1 = _affine_potential(prefix, G.f1, floor, INFINITY)
        pot2 = _affine_potential(prefix, G.f2, floor, INFINITY)
        zero = PiecewiseLinear.constant(0, floor, INFINITY)
        d_pl = _negate_pl(pot1.min_with(pot2).min_with(zero))
        hi = _first_zero(d_pl)
        if hi is not None and not hi > floor:
            raise InconsistencyError("d vanishes at the segment start")
        if hi is not None:
            prefix2 = prefix
            pot1 = _affine_potential(prefix2, G.f1, floor, hi)
            pot2 = _affine_potential(prefix2, G.f2, floor, hi)
            zero = PiecewiseLinear.constant(0, floor, hi)
            d_pl = _negate_pl(pot1.min_with(pot2).min_with(zero))
        Uk = keys[-1]
        Dk = Uk.degree()
        Uk_aff = from_infinity_transform(Uk, Dk)
        Uk_pull = Uk_aff.subs(G.f1, G.f2, None)
        num = _affine_potential(prefix, Uk_pull, floor,
                                hi if hi is not None else INFINITY)
        num = num + d_pl.scale(Dk) if Dk else num
        T = induced_moebius(num, d_pl, 1)
        fps = moebius_fixed_points(T)
        fps = [fp for fp in fps
               if fp.get("everywhere_fixed") or hi is None or fp["t"] < hi]
        cand = _choose(fps, floor)
        if cand is None:
            return _affine_curve_or_boundary(G, change, keys, values, d_pl,
                                             Uk, Uk_pull, hi, walk)
        t_star, piece_idx, involutive = cand
        piece = T.pieces[piece_idx]
        skp_star = Skp("infinity", keys, values[:-1] + (t_star,))
        nu = AffineValuation.at_infinity(skp_star, change=change)
        nu_chart = AffineValuation.at_infinity(skp_star)
        d_star = d_pl(t_star)
        if not t_star.is_rational:
            walk.append(f"irrational fixed point t = {t_star} "
                        f"at depth {depth}")
            return _affine_finish_irrational(G, nu, nu_chart, d_star, piece,
                                             involutive, walk, test_degree)
        walk.append(f"rational fixed point t = {t_star} at depth {depth}")
        theta = _affine_extension_theta(G, skp_star)
        if theta is None:
            if not _affine_verify_fixed(G, nu_chart, test_degree):
                raise InconsistencyError(
                    "leading forms certify fixedness but the finite "
                    "verification disagrees")
            return _affine_finish_rational(nu, nu_chart, d_star, piece,
                                           involutive, walk, test_degree)
        data = skp_validate(skp_star)
        nk = data.n[-1]
        digits = data.m[-1]
        newkey = keys[-1] ** nk
        mono = BiPoly.monomial(digits[0], 0)
        for l in range(1, len(digits)):
            if digits[l]:
                mono = mono * keys[l] ** digits[l]
        newkey = newkey - BiPoly.const(theta) * mono
        walk.append(f"extend key with theta = {theta} at depth {depth}")
        keys = keys + (newkey,)
        values = values[:-1] + (t_star, QN.of(nk) * t_star + 1)
        depth += 1
        if depth >= max_depth:
            nu = AffineValuation.at_infinity(
                Skp("infinity", keys, values), change=change, truncated=True)
            return AffineReport(nu, None, "bounded-ratio",
                                "infinitely-singular-truncated", "type-iv",
                                walk=tuple(walk + ["max depth reached"]))


def _choose(fps, floor):
    best = None
    for fp in fps:
        if fp.get("everywhere_fixed"):
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


def _moebius_matrix(piece):
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


def _companion(rate):
    return (0, -rate.q, 1, -rate.p)


def _affine_finish_irrational(G, nu, nu_chart, d_star, piece, involutive,
                              walk, test_degree):
    if not _affine_verify_fixed(G, nu_chart, test_degree):
        raise InconsistencyError("irrational fixed point failed verification")
    rate = QuadraticInteger.from_value(d_star)
    matrix = _moebius_matrix(piece)
    if any(v < 0 for v in matrix):
        matrix = _companion(rate)
    if not involutive:
        sr = spectral_radius_2x2(*matrix)
        if sr.value != rate.value:
            matrix = _companion(rate)
    return AffineReport(nu, rate, "bounded-ratio", "irrational", "type-ii",
                        matrix=matrix, verified_to_degree=test_degree,
                        involutive=involutive, walk=tuple(walk))


def _affine_finish_rational(nu, nu_chart, d_star, piece, involutive, walk,
                            test_degree):
    alpha = nu.alpha()
    A = nu.thinness()
    rate = QuadraticInteger.from_value(d_star)
    if alpha == 0 and A < 0:
        walk.append("fixed point is a rational pencil valuation "
                    "(alpha = 0, A < 0): skew product")
        return AffineReport(nu, rate, "skew-product", "divisorial",
                            "type-iii", verified_to_degree=test_degree,
                            involutive=involutive, walk=tuple(walk))
    if alpha > 0 and A == 0:
        walk.append("divisorial fixed point with alpha > 0, A = 0")
        return AffineReport(nu, rate, "bounded-ratio", "divisorial",
                            "type-i", verified_to_degree=test_degree,
                            involutive=involutive, paper_open_case=True,
                            walk=tuple(walk))
    if involutive:
        return AffineReport(nu, rate, "bounded-ratio", "irrational",
                            "type-ii", verified_to_degree=test_degree,
                            involutive=True, walk=tuple(walk))
    return AffineReport(nu, rate, "bounded-ratio", "divisorial", "type-i",
                        verified_to_degree=test_degree,
                        involutive=involutive, walk=tuple(walk))


def _affine_curve_or_boundary(G, change, keys, values, d_pl, Uk, Uk_pull,
                              hi, walk):
    from .skpval import expansion_coeffs
    if hi is not None:
        walk.append(f"d(F, .) reaches 0 at t = {hi}: the image leaves "
                    "infinity at the segment boundary")
        raise InconsistencyError(
            "no fixed point before the d = 0 boundary; the image of the "
            "boundary valuation is not centered at infinity")
    H = at_infinity_transform(Uk_pull)
    rem = expansion_coeffs(H, Uk)
    invariant = bool(rem) and rem[0].is_zero()
    if not invariant:
        raise InconsistencyError(
            "no fixed point on the segment and the end curve is not "
            "invariant")
    c_end, s_end = d_pl.pieces[-1]
    if s_end != 0:
        raise InconsistencyError("d diverges along the invariant leg")
    walk.append(f"segment exits through the invariant curve at infinity "
                f"{Uk.render(('z', 'w'))}")
    rate = QuadraticInteger.from_value(QN.of(c_end))
    nu = AffineValuation.at_infinity(
        Skp("infinity", keys, values[:-1] + (values[-1] + 1,)), change=change)
    return AffineReport(nu, rate, "bounded-ratio", "curve", "type-iii",
                        walk=tuple(walk + ["curve end; eigen shown as a "
                                           "finite proxy on the leg"]))


def _affine_extension_theta(G: PlaneMap, skp_star: Skp):
    """theta for the next chart key, by padded leading-form comparison."""
    data = skp_validate(skp_star)
    nk = data.n[-1]
    digits = data.m[-1]
    keys = skp_star.keys
    Uk_aff = from_infinity_transform(keys[-1], keys[-1].degree())
    GA = Uk_aff.subs(G.f1, G.f2, None) ** nk
    GB = BiPoly.const(1)
    for l in range(1, len(digits)):
        if digits[l]:
            Ul_aff = from_infinity_transform(keys[l], keys[l].degree())
            GB = GB * Ul_aff.subs(G.f1, G.f2, None) ** digits[l]
    Dp = max(GA.degree(), GB.degree())
    HA = at_infinity_transform(GA) * BiPoly.monomial(Dp - GA.degree(), 0)
    HB = at_infinity_transform(GB) * BiPoly.monomial(Dp - GB.degree(), 0)
    nu_chart = Valuation.from_skp(skp_star)
    vA, la = leading_terms(nu_chart, HA)
    vB, lb = leading_terms(nu_chart, HB)
    if vA != vB:
        return None
    theta = proportionality_ratio(la, lb)
    if theta is None:
        return None
    if isinstance(theta, Fraction):
        return theta
    raise AlgebraicExtensionNeeded(f"theta = {theta} is not rational")


# -- dichotomy and identities --------------------------------------------------

def skew_dichotomy(F: PlaneMap, report: AffineReport, n_max: int) -> dict:
    degs = deg_sequence(F, n_max)
    out = {"degs": degs, "branch": report.dichotomy}
    if report.dichotomy == "bounded-ratio":
        if report.rate is None:
            raise ValdynError("report carries no rate")
        d_inf = report.rate.value
        power = QN.of(1)
        max_ratio = None
        for n, dn in enumerate(degs, start=1):
            power = power * d_inf
            if not power <= QN.of(dn):
                raise FalsificationError(
                    f"deg(F^{n}) = {dn} below d_inf^{n}")
            ratio = QN.of(dn) / power
            if max_ratio is None or ratio > max_ratio:
                max_ratio = ratio
        out["observed_D"] = max_ratio
        out["observed_D_float"] = float(max_ratio)
        return out
    # skew branch: ratios must grow without bound on the computed range
    d_inf = report.rate.value if report.rate else QN.of(degs[0])
    ratios = []
    power = QN.of(1)
    for dn in degs:
        power = power * d_inf
        ratios.append(QN.of(dn) / power)
    for i in range(1, len(ratios)):
        if ratios[i] < ratios[i - 1]:
            raise FalsificationError("skew branch but deg ratio decreased")
    if not ratios[-1] > ratios[0]:
        raise FalsificationError("skew branch but deg ratio did not grow")
    out["ratios"] = [float(r) for r in ratios]
    skewlike = F.f1.degree_in(1) == 0 or F.f1.degree_in(0) == 0
    out["first_component_univariate"] = skewlike
    if skewlike:
        Q = F.f2
        P1 = F.f1
        dy = Q.degree_in(1)
        lead = Q.coeff_of_second(dy)
        out["deg_P"] = P1.degree()
        out["deg_Y_Q"] = dy
        out["deg_drop_ok"] = bool(P1.degree() >= dy)
        import sympy
        x = sympy.Symbol("x")
        expr = sympy.Add(*[sympy.Rational(c) * x ** i
                           for (i, _), c in lead.terms.items()])
        roots = [r for r in sympy.roots(sympy.Poly(expr, x)) if r.is_rational]
        out["drop_points"] = [str(r) for r in roots]
    return out


def affine_jacobian_check(F: PlaneMap, nu: AffineValuation) -> dict:
    """nu(JF) + A(nu) = d(F, nu) * A(F_bullet nu)."""
    d = d_of(F, nu)
    if not d > 0:
        return {"checked": False, "reason": "image not centered at infinity"}
    JF = jacobian_det(F)
    vJ = nu.value(JF)
    if vJ is INFINITY:
        return {"checked": False, "reason": "Jacobian vanishes along nu"}
    image = reconstruct_affine_image(F, nu)
    if image is None:
        return {"checked": False,
                "reason": "image is not a chart-monomial valuation"}
    lhs = vJ + nu.thinness()
    rhs = d * image.thinness()
    if lhs != rhs:
        raise FalsificationError(f"affine Jacobian identity failed: "
                                 f"{lhs} != {rhs}")
    return {"checked": True, "lhs": lhs, "rhs": rhs, "d": d,
            "A_nu": nu.thinness(), "A_image": image.thinness(),
            "nu_JF": vJ}


def act_pol_check(nu: AffineValuation, factors) -> dict:
    """nu(prod P_i^{k_i}) = -sum m_i alpha(nu ^ nu_i) through branch data.

    `factors` is a list of (P_i, k_i) with each P_i having one place at
    infinity; the branch at the chart origin has multiplicity
    ord_w P~_i(0, w) and the remaining deg - m~ branches sit at other points
    at infinity, where the infimum with nu is the root (alpha = 1).
    """
    rows = []
    total_direct = QN.of(0)
    total_branch = QN.of(0)
    for P, k in factors:
        direct = nu.value(P)
        deg = P.degree()
        if nu.kind == "negdeg":
            branch = QN.of(-deg)
            m_chart = None
        else:
            from .skpval import skp_eval
            Q = P.subs(nu.change.f1, nu.change.f2, None)
            Pt = at_infinity_transform(Q)
            at0 = {j: c for (i, j), c in Pt.terms.items() if i == 0}
            m_chart = min(at0) if at0 else 0
            if m_chart:
                vt = skp_eval(Valuation.from_skp(nu.skp), Pt)
                alpha_chart = 1 - vt / m_chart
                branch = -(QN.of(m_chart) * alpha_chart + (deg - m_chart))
            else:
                branch = QN.of(-deg)
        ok = direct == branch
        if not ok:
            raise FalsificationError(
                f"branch decomposition mismatch for {P.render(('X', 'Y'))}: "
                f"{direct} != {branch}")
        rows.append({"factor": P.render(("X", "Y")), "k": k,
                     "direct": direct, "branch_sum": branch,
                     "chart_multiplicity": m_chart, "ok": ok})
        total_direct = total_direct + QN.of(k) * direct
        total_branch = total_branch + QN.of(k) * branch
    return {"rows": rows, "total_direct": total_direct,
            "total_branch": total_branch,
            "ok": total_direct == total_branch}
