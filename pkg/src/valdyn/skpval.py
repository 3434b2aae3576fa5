"""Valuations presented by sequences of key polynomials (SKPs).

An SKP is a list of keys [U_0, U_1, ..., U_k] together with values
[1, b_1, ..., b_k].  U_0 and U_1 are the two coordinates; each later key is
U_{j+1} = U_j^{n_j} - theta_j * U_0^{m_{j,0}} ... U_{j-1}^{m_{j,j-1}} where
n_j is the order of b_j in the group generated by the earlier values and the
exponents m_{j,l} are the canonical digits of n_j*b_j in that group.
Evaluation expands a polynomial in powers of the last key by division and
recurses; the value is the minimum over the expansion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from .errors import (
    InconsistencyError,
    NotDivisorialError,
    ParseError,
    SkpAxiomError,
    ValdynError,
)
from .numbers import QN, Rational
from .poly import BiPoly, at_infinity_transform, parse_poly


class _Infinity:
    """Value of the zero polynomial; bigger than every quadratic number."""

    def __gt__(self, other):
        return True

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return isinstance(other, _Infinity)

    def __eq__(self, other):
        return isinstance(other, _Infinity)

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __hash__(self):
        return hash("valdyn-infinity")

    def __repr__(self):
        return "+inf"


INFINITY = _Infinity()


def vmin(values):
    """Minimum of quadratic numbers and INFINITY markers."""
    best = INFINITY
    for v in values:
        if v is INFINITY:
            continue
        if best is INFINITY or v < best:
            best = v
    return best


# -- rational group helpers ----------------------------------------------------

def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    den = lcm(a.denominator, b.denominator)
    return Fraction(gcd(a.numerator * den // a.denominator,
                        b.numerator * den // b.denominator), den)


def _group_generator(values):
    """Generator of the additive group sum Z*v_i for rationals v_i."""
    g = Fraction(0)
    for v in values:
        g = _frac_gcd(g, v) if g else Fraction(v)
    return g


# -- the SKP type --------------------------------------------------------------

@dataclass(frozen=True)
class SkpData:
    n: tuple       # n_j for j = 1..k (n_k present only when b_k is rational)
    m: tuple       # m[j] = digits (m_{j,0}, ..., m_{j,j-1}) for stages with keys
    d: tuple       # d_j for j = 1..k
    theta: tuple   # theta_j for j = 1..k-1


@dataclass(frozen=True)
class Skp:
    chart: str          # "local" (x, y) or "infinity" (z, w)
    keys: tuple         # BiPoly, length k+1
    values: tuple       # QN, length k+1, values[0] == 1

    def __post_init__(self):
        if self.chart not in ("local", "infinity"):
            raise ValdynError(f"bad chart {self.chart!r}")
        object.__setattr__(self, "keys", tuple(self.keys))
        object.__setattr__(self, "values", tuple(QN.of(v) for v in self.values))

    @property
    def depth(self) -> int:
        return len(self.keys) - 1

    def last_value(self) -> QN:
        return self.values[-1]

    def with_last_value(self, t) -> "Skp":
        return Skp(self.chart, self.keys, self.values[:-1] + (QN.of(t),))

    def extended(self, key: BiPoly, value) -> "Skp":
        return Skp(self.chart, self.keys + (key,), self.values + (QN.of(value),))

    def truncated_at(self, stage: int) -> "Skp":
        return Skp(self.chart, self.keys[: stage + 1], self.values[: stage + 1])

    def var_names(self):
        return ("x", "y") if self.chart == "local" else ("z", "w")

    def render(self) -> str:
        vs = self.var_names()
        keys = ", ".join(k.render(vs) for k in self.keys)
        vals = ", ".join(str(v) for v in self.values)
        return f"skp{{chart={self.chart}; keys=[{keys}]; values=[{vals}]}}"

    __repr__ = render


def _digits_for(target: Fraction, values, n_list):
    """Digits (m_0,...,m_{j-1}) with target = sum m_l * values[l], 0<=m_l<n_l.

    values are the earlier SKP values (rationals), n_list the matching n_l
    for l >= 1.  Returns None when no admissible digit string exists.
    """
    j = len(values)
    digits = [0] * j
    rest = Fraction(target)
    for l in range(j - 1, 0, -1):
        g = _group_generator(values[:l])
        found = None
        for m in range(n_list[l - 1]):
            r = rest - m * Fraction(values[l])
            if (r / g).denominator == 1:
                found = m
                break
        if found is None:
            return None
        digits[l] = found
        rest -= found * Fraction(values[l])
    if rest.denominator != 1 or rest < 0:
        return None
    digits[0] = int(rest)
    return tuple(digits)


@lru_cache(maxsize=4096)
def skp_validate(skp: Skp) -> SkpData:
    """Recompute n_j, m_{j,l}, d_j, theta_j and check every axiom."""
    keys, values = skp.keys, skp.values
    k = skp.depth
    if k < 1:
        raise SkpAxiomError(0, "need at least the two coordinate keys")
    if keys[0] != BiPoly.var(0) or keys[1] != BiPoly.var(1):
        raise SkpAxiomError(0, "first two keys must be the coordinates")
    if values[0] != 1:
        raise SkpAxiomError(0, "first value must be 1")
    if not values[1] > 0:
        raise SkpAxiomError(1, "second value must be positive")
    if skp.chart == "local" and values[1] < 1:
        raise SkpAxiomError(1, "local chart requires the second value >= 1 "
                               "(swap coordinates first)")
    for j in range(1, k):
        if not values[j].is_rational:
            raise SkpAxiomError(j, "only the last value may be irrational")

    rats = [Fraction(1)]
    n_list, d_list, m_list, theta_list = [], [], [], []
    d = 1
    for j in range(1, k + 1):
        d_list.append(d)
        v = values[j]
        if not v.is_rational:
            break
        bj = v.as_rational()
        g = _group_generator(rats)
        nj = (bj / g).denominator
        n_list.append(nj)
        digits = _digits_for(nj * bj, tuple(rats), tuple(n_list[:-1]))
        if digits is None:
            raise SkpAxiomError(j, f"{nj}*{bj} has no admissible digit expansion")
        m_list.append(digits)
        if j < k:
            if not values[j + 1] > nj * bj:
                raise SkpAxiomError(j + 1, f"value must exceed n_j*b_j = {nj * bj}")
            expected = keys[j] ** nj
            mono = BiPoly.const(1)
            for l, ml in enumerate(digits):
                if ml:
                    mono = mono * keys[l] ** ml
            delta = expected - keys[j + 1]
            if delta.is_zero():
                raise SkpAxiomError(j + 1, "theta must be nonzero")
            ratio = None
            if set(delta.terms) == set(mono.terms):
                e0 = next(iter(mono.terms))
                ratio = delta.terms[e0] / mono.terms[e0]
                if delta != mono * ratio:
                    ratio = None
            if ratio is None or ratio == 0:
                raise SkpAxiomError(
                    j + 1, "key is not U_j^n_j - theta * (monomial in earlier keys)")
            theta_list.append(ratio)
            d *= nj
        rats.append(bj)
    return SkpData(tuple(n_list), tuple(m_list), tuple(d_list), tuple(theta_list))


# -- valuations ----------------------------------------------------------------

@dataclass(frozen=True)
class Valuation:
    kind: str                 # "monomial" | "skp" | "negdeg"
    s: QN = None
    t: QN = None
    skp: Skp = None
    truncated: bool = False   # finite stand-in for an infinitely singular end

    @staticmethod
    def nu_m() -> "Valuation":
        return Valuation.monomial(1, 1)

    @staticmethod
    def monomial(s, t) -> "Valuation":
        s, t = QN.of(s), QN.of(t)
        if not (s > 0 and t > 0):
            raise ValdynError("monomial weights must be positive")
        lo = s if s < t else t
        return Valuation("monomial", s=s / lo, t=t / lo)

    @staticmethod
    def from_skp(skp: Skp, truncated=False) -> "Valuation":
        skp_validate(skp)
        return Valuation("skp", skp=skp, truncated=truncated)

    @staticmethod
    def neg_deg() -> "Valuation":
        return Valuation("negdeg")

    @property
    def chart(self) -> str:
        if self.kind == "negdeg":
            return "infinity"
        if self.kind == "monomial":
            return "local"
        return self.skp.chart

    def render(self) -> str:
        if self.kind == "negdeg":
            return "-deg"
        if self.kind == "monomial":
            return f"monomial({self.s}, {self.t})"
        s = self.skp.render()
        return s + " [truncated]" if self.truncated else s

    __repr__ = render


# -- evaluation ----------------------------------------------------------------

def _w_leading(U: BiPoly):
    dw = U.degree_in(1)
    lead = U.coeff_of_second(dw)
    return dw, lead


def expansion_coeffs(P: BiPoly, U: BiPoly):
    """P = sum_j phi_j * U^j with deg_w(phi_j) < deg_w(U); returns [phi_0, ...]."""
    dw, lead = _w_leading(U)
    if dw < 1:
        raise ValdynError("expansion key must involve the second variable")
    if lead.degree() != 0:
        raise ValdynError("expansion key must be monic in the second variable")
    c = lead.terms[(0, 0)]
    out = []
    rest = P
    while not rest.is_zero():
        # remainder of rest modulo U in the second variable
        r = rest
        q = BiPoly.zero()
        while r.degree_in(1) >= dw:
            dr = r.degree_in(1)
            top = r.coeff_of_second(dr)
            shift = BiPoly.make(
                {(i, dr - dw): cc / c for (i, _), cc in top.terms.items()})
            q = q + shift
            r = r - shift * U
        out.append(r)
        rest = q
    return out


def _eval_stage(skp: Skp, stage: int, P: BiPoly):
    if P.is_zero():
        return INFINITY
    if stage == 1:
        t = skp.values[1]
        return vmin(QN.of(i) + t * j for (i, j) in P.terms)
    vals = []
    bk = skp.values[stage]
    for j, phi in enumerate(expansion_coeffs(P, skp.keys[stage])):
        if phi.is_zero():
            continue
        vals.append(_eval_stage(skp, stage - 1, phi) + bk * j)
    return vmin(vals)


def skp_eval(nu: Valuation, P: BiPoly):
    """nu(P) for a monomial or SKP valuation; INFINITY for P = 0."""
    if P.is_zero():
        return INFINITY
    if nu.kind == "monomial":
        return vmin(nu.s * i + nu.t * j for (i, j) in P.terms)
    if nu.kind == "skp":
        skp_validate(nu.skp)
        return _eval_stage(nu.skp, nu.skp.depth, P)
    raise ValdynError("use affine_eval for -deg")


def leading_terms(nu: Valuation, P: BiPoly):
    """The minimal-value part of P's key-monomial expansion along nu.

    Returns (value, dict) where the dict maps exponent tuples
    (a_0, ..., a_k) over the keys to rational coefficients.  The expansion
    with digit bounds is unique, so proportionality of leading parts is a
    faithful graded-ring comparison.
    """
    if P.is_zero():
        return INFINITY, {}
    if nu.kind == "monomial":
        if nu.s != 1:
            raise ValdynError("leading form needs generic coordinates (s = 1)")
        v = skp_eval(nu, P)
        return v, {e: c for e, c in P.terms.items()
                   if QN.of(e[0]) + nu.t * e[1] == v}
    skp = nu.skp

    def rec(stage, Q):
        if Q.is_zero():
            return INFINITY, {}
        if stage == 1:
            t = skp.values[1]
            v = vmin(QN.of(i) + t * j for (i, j) in Q.terms)
            return v, {(i, j): c for (i, j), c in Q.terms.items()
                       if QN.of(i) + t * j == v}
        best, parts = INFINITY, []
        bk = skp.values[stage]
        for j, phi in enumerate(expansion_coeffs(Q, skp.keys[stage])):
            if phi.is_zero():
                continue
            v, lead = rec(stage - 1, phi)
            total = v + bk * j
            parts.append((total, j, lead))
            if best is INFINITY or total < best:
                best = total
        out = {}
        for total, j, lead in parts:
            if total == best:
                for e, c in lead.items():
                    out[e + (j,)] = c
        return best, out

    return rec(skp.depth, P)


def proportionality_ratio(lead_a: dict, lead_b: dict):
    """theta with lead_a = theta * lead_b termwise, or None."""
    if set(lead_a) != set(lead_b) or not lead_a:
        return None
    e0 = next(iter(lead_b))
    theta = lead_a[e0] / lead_b[e0]
    for e, c in lead_b.items():
        if lead_a[e] != theta * c:
            return None
    return theta


# -- invariants ----------------------------------------------------------------

def relative_skewness(skp: Skp) -> QN:
    data = skp_validate(skp)
    return vmin([]) if skp.depth == 0 else max(
        skp.values[j] / data.d[j - 1] for j in range(1, skp.depth + 1))


def skewness(nu: Valuation) -> QN:
    if nu.kind == "negdeg":
        return QN.of(1)
    if nu.kind == "monomial":
        return nu.s if nu.s > nu.t else nu.t
    a = relative_skewness(nu.skp)
    return a if nu.skp.chart == "local" else QN.of(1) - a


def valuation_multiplicity(nu: Valuation) -> int:
    if nu.kind in ("negdeg", "monomial"):
        return 1
    data = skp_validate(nu.skp)
    return data.d[-1]


def relative_thinness(skp: Skp) -> QN:
    """1 + integral of the relative multiplicity, stagewise."""
    data = skp_validate(skp)
    total = QN.of(1)
    prev = QN.of(0)
    for j in range(1, skp.depth + 1):
        aj = skp.values[j] / data.d[j - 1]
        total = total + (aj - prev) * data.d[j - 1]
        prev = aj
    return total


def thinness(nu: Valuation) -> QN:
    if nu.kind == "negdeg":
        return QN.of(-2)
    if nu.kind == "monomial":
        return nu.s + nu.t
    if nu.skp.chart == "infinity":
        return relative_thinness(nu.skp) - 3
    data = skp_validate(nu.skp)
    total = QN.of(2)
    prev = QN.of(1)
    for j in range(1, nu.skp.depth + 1):
        aj = nu.skp.values[j] / data.d[j - 1]
        total = total + (aj - prev) * data.d[j - 1]
        prev = aj
    return total


def inf_skewness(nu: Valuation, phi: BiPoly) -> QN:
    """alpha(nu ^ nu_phi) = nu(phi)/m(phi) for an irreducible local germ phi."""
    from .poly import multiplicity
    if phi.is_zero():
        raise ValdynError("zero polynomial")
    v = skp_eval(nu, phi)
    if v is INFINITY:
        raise ValdynError("phi is in the valuation's own zero set")
    return v / multiplicity(phi)


def generic_multiplicity(nu: Valuation) -> int:
    vals = []
    if nu.kind == "monomial":
        vals = [nu.s, nu.t]
    elif nu.kind == "skp":
        vals = list(nu.skp.values)
    elif nu.kind == "negdeg":
        return 1
    b = 1
    for v in vals:
        if not v.is_rational:
            raise NotDivisorialError(f"irrational value {v}")
        b = lcm(b, v.as_rational().denominator)
    return b


# -- one place at infinity -----------------------------------------------------

def one_place_certify(skp: Skp) -> dict:
    """Check the value/degree hypotheses that force D_j = deg(U_j) = d_j."""
    if skp.chart != "infinity":
        raise ValdynError("certification applies to the at-infinity chart")
    data = skp_validate(skp)
    k = skp.depth
    stages = []
    beta_ok = True
    for j in range(1, k + 1):
        dj = data.d[j - 1]
        Dj = skp.keys[j].degree()
        le = bool(skp.values[j] <= dj)
        beta_ok = beta_ok and le
        stages.append({"stage": j, "d": dj, "deg": Dj,
                       "value_le_d": le, "degree_matches": Dj == dj})
    total = skp.values[1]
    for j in range(1, k):
        total = total + (skp.values[j + 1] - data.n[j - 1] * skp.values[j])
    sum_ok = bool(total < 2)
    degrees_ok = all(s["degree_matches"] for s in stages)
    return {
        "stages": stages,
        "values_bounded": beta_ok,
        "sum_condition": sum_ok,
        "sum_value": total,
        "degrees_match": degrees_ok,
        "certified": beta_ok and sum_ok and degrees_ok,
    }


def affine_eval(nu: Valuation, P: BiPoly):
    """Value of nu on an affine polynomial, nu normalized by nu(lines) = -1."""
    if P.is_zero():
        return INFINITY
    if nu.kind == "negdeg":
        return QN.of(-P.degree())
    if nu.chart != "infinity":
        raise ValdynError("affine_eval needs an at-infinity valuation")
    return skp_eval(nu, at_infinity_transform(P)) - P.degree()


def pencil_genus(A: QN, b: int) -> dict:
    """Genus g from A = (2g-1)/b; errors when the data is not a pencil's."""
    A = QN.of(A)
    if not A.is_rational:
        raise InconsistencyError("thinness of a pencil valuation is rational")
    if b < 1:
        raise InconsistencyError("generic multiplicity must be >= 1")
    g2 = A.as_rational() * b + 1
    if g2.denominator != 1 or g2 % 2 != 0 or g2 < 0:
        raise InconsistencyError(f"(A*b+1)/2 = {g2}/2 is not a genus")
    return {"genus": int(g2 // 2), "rational_pencil": bool(A <= 0)}


# -- textual forms -------------------------------------------------------------

def parse_qn(text: str) -> QN:
    """Arithmetic over Q(sqrt(D)) literals: e.g. (sqrt(22)-1)/3."""
    tk_text = text.strip()
    pos = [0]

    def peek():
        while pos[0] < len(tk_text) and tk_text[pos[0]].isspace():
            pos[0] += 1
        return tk_text[pos[0]] if pos[0] < len(tk_text) else ""

    def take():
        c = peek()
        pos[0] += 1
        return c

    def err(msg):
        raise ParseError(f"at position {pos[0]}: {msg}")

    def atom():
        c = peek()
        if c == "(":
            take()
            v = total()
            if peek() != ")":
                err("expected ')'")
            take()
            return v
        if c.isdigit():
            s = ""
            while peek().isdigit():
                s += take()
            return QN.of(int(s))
        if c.isalpha():
            name = ""
            while peek().isalpha():
                name += take()
            if name != "sqrt":
                err(f"unknown name {name!r}")
            if peek() != "(":
                err("sqrt needs '('")
            take()
            s = ""
            while peek().isdigit():
                s += take()
            if peek() != ")":
                err("expected ')'")
            take()
            return QN.sqrt_of(int(s))
        err(f"unexpected {c!r}")

    def product():
        v = atom()
        while peek() in "*/" and peek():
            if take() == "*":
                v = v * atom()
            else:
                v = v / atom()
        return v

    def total():
        neg = False
        while peek() and peek() in "+-":
            if take() == "-":
                neg = not neg
        v = product()
        if neg:
            v = -v
        while peek() and peek() in "+-":
            op = take()
            w = product()
            v = v - w if op == "-" else v + w
        return v

    v = total()
    if peek():
        err(f"unexpected {peek()!r}")
    return v


def parse_valuation(text: str) -> Valuation:
    t = text.strip()
    if t in ("-deg", "negdeg"):
        return Valuation.neg_deg()
    if t.startswith("monomial(") and t.endswith(")"):
        inner = t[len("monomial("):-1]
        parts = inner.split(",")
        if len(parts) != 2:
            raise ParseError("monomial(s, t) needs two weights")
        return Valuation.monomial(parse_qn(parts[0]), parse_qn(parts[1]))
    if t.startswith("skp{") and t.endswith("}"):
        body = t[len("skp{"):-1]
        fields = {}
        for part in body.split(";"):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise ParseError(f"bad skp field {part!r}")
            k, v = part.split("=", 1)
            fields[k.strip()] = v.strip()
        chart = fields.get("chart", "local")
        if chart not in ("local", "infinity"):
            raise ParseError(f"bad chart {chart!r}")
        vars = ("x", "y") if chart == "local" else ("z", "w")
        keys_txt = fields.get("keys", "")
        vals_txt = fields.get("values", "")
        if not (keys_txt.startswith("[") and keys_txt.endswith("]")):
            raise ParseError("keys=[...] required")
        if not (vals_txt.startswith("[") and vals_txt.endswith("]")):
            raise ParseError("values=[...] required")
        keys = [parse_poly(s, vars) for s in _split_top(keys_txt[1:-1])]
        vals = [parse_qn(s) for s in _split_top(vals_txt[1:-1])]
        if len(keys) != len(vals):
            raise ParseError("keys and values must have equal length")
        return Valuation.from_skp(Skp(chart, tuple(keys), tuple(vals)))
    raise ParseError(f"unrecognized valuation {text!r}")


def _split_top(s: str):
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur)
    return [p.strip() for p in out]


def valuation_to_json(nu: Valuation):
    if nu.kind == "negdeg":
        return {"kind": "negdeg"}
    if nu.kind == "monomial":
        return {"kind": "monomial", "s": nu.s.to_json(), "t": nu.t.to_json()}
    vs = nu.skp.var_names()
    return {
        "kind": "skp",
        "chart": nu.skp.chart,
        "keys": [k.render(vs) for k in nu.skp.keys],
        "values": [v.to_json() for v in nu.skp.values],
        "truncated": nu.truncated,
    }
