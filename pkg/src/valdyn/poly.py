"""Sparse bivariate polynomials over Q, plane maps, and iteration oracles.

A BiPoly is variable-agnostic: it maps exponent pairs (i, j) to rational
coefficients.  Which letters the two slots print as (x,y / X,Y / z,w) is a
presentation choice made at parse/render time.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import ParseError, ResourceLimitError, ValdynError

try:  # gmpy2 speeds up the big-integer paths; plain int is a correct fallback
    from gmpy2 import mpz as _mpz
except ImportError:
    def _mpz(x):
        return x

DEFAULT_TERM_BUDGET = 200_000


def _refrac(v) -> Fraction:
    """Rewrap a raw coefficient (bare integer, mpq, or Fraction) as a Fraction."""
    if isinstance(v, Fraction):
        return v
    return Fraction(int(v.numerator), int(v.denominator))


def term_budget() -> int:
    raw = os.environ.get("VALDYN_TERM_BUDGET", "")
    try:
        return int(raw) if raw else DEFAULT_TERM_BUDGET
    except ValueError:
        raise ParseError(f"VALDYN_TERM_BUDGET must be an integer, got {raw!r}")


@dataclass(frozen=True)
class BiPoly:
    terms: dict = field(default_factory=dict)  # (i, j) -> Fraction, no zeros

    @staticmethod
    def make(terms) -> "BiPoly":
        clean = {}
        for (i, j), c in dict(terms).items():
            c = Fraction(c)
            if c != 0:
                if i < 0 or j < 0:
                    raise ValdynError("negative exponent")
                clean[(i, j)] = c
        return BiPoly(clean)

    @staticmethod
    def zero() -> "BiPoly":
        return BiPoly({})

    @staticmethod
    def const(c) -> "BiPoly":
        return BiPoly.make({(0, 0): Fraction(c)})

    @staticmethod
    def var(slot: int) -> "BiPoly":
        """slot 0 is the first variable, slot 1 the second."""
        return BiPoly.make({(1, 0) if slot == 0 else (0, 1): 1})

    @staticmethod
    def monomial(i: int, j: int, c=1) -> "BiPoly":
        return BiPoly.make({(i, j): Fraction(c)})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, BiPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == BiPoly.const(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BiPoly.const(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return BiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BiPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return BiPoly.zero()
            return BiPoly({e: c * other for e, c in self.terms.items()})
        return self.mul_trunc(other, None)

    def _raw(self) -> dict:
        """Coefficient dict with integer values unwrapped to bare integers."""
        return {e: (_mpz(c.numerator) if c.denominator == 1 else c)
                for e, c in self.terms.items()}

    @staticmethod
    def _mul_raw(a: dict, b: dict, order) -> dict:
        """Raw-dict product, discarding terms of total degree >= order.

        Terms are scanned in degree order so out-of-range pairs are skipped
        in bulk; plain-int values multiply without Fraction overhead.
        """
        A = sorted((i + j, i, j, c) for (i, j), c in a.items())
        B = sorted((i + j, i, j, c) for (i, j), c in b.items())
        out = {}
        if not A or not B:
            return out
        for da, ia, ja, ca in A:
            if order is not None and da + B[0][0] >= order:
                break
            for db, ib, jb, cb in B:
                if order is not None and da + db >= order:
                    break
                e = (ia + ib, ja + jb)
                out[e] = out.get(e, 0) + ca * cb
        return {e: v for e, v in out.items() if v}

    def mul_trunc(self, other: "BiPoly", order) -> "BiPoly":
        """Product, discarding output terms of total degree >= order."""
        out = BiPoly._mul_raw(self._raw(), other._raw(), order)
        return BiPoly({e: _refrac(v) for e, v in out.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValdynError("negative power")
        r = BiPoly.const(1)
        base = self
        while n:
            if n & 1:
                r = r * base
            base = base * base if n > 1 else base
            n >>= 1
        return r

    @staticmethod
    def _pow_raw(base: dict, n: int, order) -> dict:
        """Raw-dict power, discarding terms of total degree >= order.

        Monomial and binomial bases expand in closed form, emitting only the
        surviving terms; larger bases fall back to binary powering with a
        reserve-tightened cutoff at each step.
        """
        if n < 0:
            raise ValdynError("negative power")
        if order <= 0:
            return {}
        if n == 0:
            return {(0, 0): 1}
        if not base:
            return {}
        if len(base) == 1:
            ((i, j), c), = base.items()
            if (i + j) * n >= order:
                return {}
            return {(i * n, j * n): c ** n}
        if len(base) == 2:
            (e1, c1), (e2, c2) = sorted(base.items())
            d1, d2 = e1[0] + e1[1], e2[0] + e2[1]
            # the k-th term of the expansion has degree k*d1 + (n-k)*d2
            if d1 == d2:
                if n * d1 >= order:
                    return {}
                lo, hi = 0, n
            elif d1 > d2:
                num = order - n * d2
                if num <= 0:
                    return {}
                lo, hi = 0, min(n, -(-num // (d1 - d2)) - 1)
            else:
                num = order - n * d2
                if num > 0:
                    lo = 0
                else:
                    lo = num // (d1 - d2) + 1
                hi = n
            if lo > hi:
                return {}
            out = {}
            if not isinstance(c1, Fraction) and not isinstance(c2, Fraction):
                # all-integer expansion: C(n,k)*c1^k stays divisible by k at
                # each incremental step, and c2^(n-k) divides its predecessor
                a, b = comb(n, lo) * c1 ** lo, c2 ** (n - lo)
                for k in range(lo, hi + 1):
                    if k > lo:
                        a = a * c1 * (n - k + 1) // k
                        b //= c2
                    out[(e1[0] * k + e2[0] * (n - k),
                         e1[1] * k + e2[1] * (n - k))] = a * b
                return out
            coeff = Fraction(comb(n, lo)) * c1 ** lo * c2 ** (n - lo)
            for k in range(lo, hi + 1):
                if k > lo:
                    coeff = coeff * c1 * (n - k + 1) / (c2 * k)
                out[(e1[0] * k + e2[0] * (n - k),
                     e1[1] * k + e2[1] * (n - k))] = coeff
            return out
        m = min(i + j for i, j in base)
        h = BiPoly._pow_raw(base, n // 2, order - (n - n // 2) * m)
        t = BiPoly._mul_raw(h, h, order - (n % 2) * m)
        if n % 2:
            t = BiPoly._mul_raw(t, base, order)
        return t

    def pow_trunc(self, n: int, order) -> "BiPoly":
        """self**n, discarding output terms of total degree >= order."""
        if order is None:
            return self ** n
        out = BiPoly._pow_raw(self._raw(), n, order)
        return BiPoly({e: _refrac(v) for e, v in out.items()})

    # -- structure -----------------------------------------------------------

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(i + j for i, j in self.terms)

    def degree_in(self, slot: int) -> int:
        if not self.terms:
            return -1
        return max(e[slot] for e in self.terms)

    def homogeneous_part(self, d: int) -> "BiPoly":
        return BiPoly({e: c for e, c in self.terms.items() if e[0] + e[1] == d})

    def coeff_of_second(self, j: int) -> "BiPoly":
        """Coefficient of (second variable)^j, a polynomial in the first."""
        return BiPoly({(i, 0): c for (i, jj), c in self.terms.items() if jj == j})

    def truncate(self, order: int) -> "BiPoly":
        """Drop all terms of total degree >= order."""
        return BiPoly({e: c for e, c in self.terms.items() if e[0] + e[1] < order})

    def deriv(self, slot: int) -> "BiPoly":
        out = {}
        for (i, j), c in self.terms.items():
            e = (i, j)[slot]
            if e:
                ne = (i - 1, j) if slot == 0 else (i, j - 1)
                out[ne] = out.get(ne, Fraction(0)) + c * e
        return BiPoly({e: c for e, c in out.items() if c != 0})

    def subs(self, g1: "BiPoly", g2: "BiPoly", order=None) -> "BiPoly":
        """Substitute the two variables, optionally truncating at total degree order.

        With a truncation order, each intermediate product reserves the
        minimal degrees of the factors still to be multiplied in, so its own
        cutoff can be lowered by that reserve without losing any term of the
        final result below the order.
        """
        if order is None:
            pow1, pow2 = {0: BiPoly.const(1)}, {0: BiPoly.const(1)}

            def p(cache, base, n):
                while len(cache) <= n:
                    cache[len(cache)] = cache[len(cache) - 1] * base
                return cache[n]

            out = BiPoly.zero()
            for (i, j), c in sorted(self.terms.items()):
                out = out + p(pow1, g1, i) * p(pow2, g2, j) * c
            return out

        acc = self._subs_acc(g1, g2, order)
        out = {}
        while acc:  # consume as we wrap, keeping one copy in memory
            e, v = acc.popitem()
            out[e] = _refrac(v)
        return BiPoly(out)

    def _subs_acc(self, g1: "BiPoly", g2: "BiPoly", order: int) -> dict:
        """Raw coefficient dict of self(g1, g2) truncated at total degree order."""
        m1 = min((i + j for i, j in g1.terms), default=None)
        m2 = min((i + j for i, j in g2.terms), default=None)
        r1d, r2d = g1._raw(), g2._raw()
        acc = {}
        for (i, j), c in self.terms.items():
            if (i and m1 is None) or (j and m2 is None):
                continue
            r1, r2 = i * (m1 or 0), j * (m2 or 0)
            if r1 + r2 >= order:
                continue
            P1 = BiPoly._pow_raw(r1d, i, order - r2)
            P2 = BiPoly._pow_raw(r2d, j, order - r1)
            cr = _mpz(c.numerator) if c.denominator == 1 else c
            for e, v in BiPoly._mul_raw(P1, P2, order).items():
                s = acc.get(e, 0) + v * cr
                if s:
                    acc[e] = s
                else:
                    acc.pop(e, None)
        return acc

    def ord_of_subs(self, g1: "BiPoly", g2: "BiPoly", order: int):
        """Minimal total degree of self(g1, g2) below order, or None.

        Computes only the multiplicity, never materializing the composed
        polynomial; the accumulator is freed as soon as the answer is known.
        """
        acc = self._subs_acc(g1, g2, order)
        best = min((i + j for i, j in acc), default=None)
        acc.clear()
        return best

    def scale_coeffs(self, f) -> "BiPoly":
        return BiPoly.make({e: f * c for e, c in self.terms.items()})

    def content_and_primitive(self):
        """Rational content (positive leading sign) and primitive integer part."""
        if not self.terms:
            return Fraction(0), self
        from math import gcd
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        cont = Fraction(num, den)
        lead = self.terms[max(sorted(self.terms))]
        if lead < 0:
            cont = -cont
        return cont, self.scale_coeffs(1 / cont)

    # -- rendering and parsing ------------------------------------------------

    def render(self, vars=("x", "y")) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for (i, j) in sorted(self.terms):
            c = self.terms[(i, j)]
            factors = []
            if i:
                factors.append(vars[0] + (f"^{i}" if i > 1 else ""))
            if j:
                factors.append(vars[1] + (f"^{j}" if j > 1 else ""))
            if not factors or abs(c) != 1:
                factors.insert(0, str(abs(c)))
            mono = "*".join(factors)
            pieces.append(("- " if c < 0 else "+ ") + mono)
        s = " ".join(pieces)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    __repr__ = render


# -- parsing ------------------------------------------------------------------

class _Tok:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self):
        c = self.peek()
        self.pos += 1
        return c

    def error(self, msg):
        raise ParseError(f"at position {self.pos}: {msg}")


def parse_poly(text: str, vars=("x", "y")) -> BiPoly:
    """Parse a polynomial in the two given variable names over Q.

    Grammar: + - * ^ and parentheses; coefficients are integers or p/q.
    """
    tk = _Tok(text)
    p = _parse_sum(tk, vars)
    if tk.peek():
        tk.error(f"unexpected {tk.peek()!r}")
    return p


def _parse_sum(tk, vars):
    neg = False
    while tk.peek() and tk.peek() in "+-":
        if tk.take() == "-":
            neg = not neg
    p = _parse_product(tk, vars)
    if neg:
        p = -p
    while tk.peek() and tk.peek() in "+-":
        op = tk.take()
        q = _parse_product(tk, vars)
        p = p - q if op == "-" else p + q
    return p


def _parse_product(tk, vars):
    p = _parse_power(tk, vars)
    while True:
        c = tk.peek()
        if c == "*":
            tk.take()
            p = p * _parse_power(tk, vars)
        elif c == "/":
            tk.take()
            q = _parse_power(tk, vars)
            if q.degree() != 0:
                tk.error("division only by constants")
            p = p.scale_coeffs(1 / q.terms[(0, 0)])
        elif c == "(" or c.isalpha() or c.isdigit():
            # juxtaposition, e.g. 2x^2y
            p = p * _parse_power(tk, vars)
        else:
            return p


def _parse_power(tk, vars):
    p = _parse_atom(tk, vars)
    if tk.peek() == "^":
        tk.take()
        n = _parse_int(tk)
        if n < 0:
            tk.error("negative exponent")
        p = p ** n
    return p


def _parse_atom(tk, vars):
    c = tk.peek()
    if c == "(":
        tk.take()
        p = _parse_sum(tk, vars)
        if tk.peek() != ")":
            tk.error("expected ')'")
        tk.take()
        return p
    if c.isdigit():
        n = _parse_int(tk)
        return BiPoly.const(n)
    if c.isalpha():
        name = ""
        while tk.peek().isalpha():
            name += tk.take()
        if name == vars[0]:
            return BiPoly.var(0)
        if name == vars[1]:
            return BiPoly.var(1)
        tk.error(f"unknown variable {name!r} (expected {vars[0]} or {vars[1]})")
    tk.error(f"unexpected {c!r}")


def _parse_int(tk):
    s = ""
    if tk.peek() == "-":
        s += tk.take()
    if not tk.peek().isdigit():
        tk.error("expected integer")
    while tk.peek().isdigit():
        s += tk.take()
    return int(s)


# -- Newton diagram ------------------------------------------------------------

@dataclass(frozen=True)
class NewtonDiagram:
    """Extreme points of the lower-left convex hull of the support."""

    vertices: tuple

    @staticmethod
    def of(P: BiPoly) -> "NewtonDiagram":
        if P.is_zero():
            raise ValdynError("zero polynomial has no Newton diagram")
        # keep, per i, the minimal j; then take the lower convex hull
        best = {}
        for (i, j) in P.terms:
            if i not in best or j < best[i]:
                best[i] = j
        pts = sorted(best.items())
        hull = []
        for p in pts:
            while len(hull) >= 2:
                (x1, y1), (x2, y2) = hull[-2], hull[-1]
                # drop hull[-1] if not strictly below the chord hull[-2] -> p
                if (x2 - x1) * (p[1] - y1) <= (p[0] - x1) * (y2 - y1):
                    hull.pop()
                else:
                    break
            hull.append(p)
        # prune points that are not extreme on the decreasing part
        out = [hull[0]]
        for p in hull[1:]:
            if p[1] < out[-1][1]:
                out.append(p)
        return NewtonDiagram(tuple(out))

    def min_value(self, s, t):
        """min over vertices of s*i + t*j (s, t may be quadratic numbers)."""
        vals = [s * i + t * j for i, j in self.vertices]
        m = vals[0]
        for v in vals[1:]:
            if v < m:
                m = v
        return m


# -- plane maps ----------------------------------------------------------------

@dataclass(frozen=True)
class PlaneMap:
    f1: BiPoly
    f2: BiPoly
    kind: str  # "local-germ" or "affine"

    def __post_init__(self):
        if self.kind not in ("local-germ", "affine"):
            raise ValdynError(f"bad map kind {self.kind!r}")
        if self.kind == "local-germ":
            for f in (self.f1, self.f2):
                if (0, 0) in f.terms:
                    raise ValdynError("local germ must fix the origin")

    def components(self):
        return (self.f1, self.f2)

    def is_dominant(self) -> bool:
        return not jacobian_det(self).is_zero()

    def render(self, vars=None) -> str:
        if vars is None:
            vars = ("x", "y") if self.kind == "local-germ" else ("X", "Y")
        return f"({self.f1.render(vars)}, {self.f2.render(vars)})"


def parse_map(text: str, kind: str) -> PlaneMap:
    vars = ("x", "y") if kind == "local-germ" else ("X", "Y")
    t = text.strip()
    if not (t.startswith("(") and t.endswith(")")):
        raise ParseError("map must look like (f1, f2)")
    depth, split = 0, None
    for i, ch in enumerate(t):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 1:
            split = i
            break
    if split is None:
        raise ParseError("map needs two comma-separated components")
    f1 = parse_poly(t[1:split], vars)
    f2 = parse_poly(t[split + 1:-1], vars)
    return PlaneMap(f1, f2, kind)


# -- operations ---------------------------------------------------------------

def multiplicity(P: BiPoly) -> int:
    """Minimal total degree over the support of a nonzero polynomial."""
    if P.is_zero():
        raise ValdynError("multiplicity of the zero polynomial is undefined")
    return min(i + j for i, j in P.terms)


def jacobian_det(f: PlaneMap) -> BiPoly:
    return f.f1.deriv(0) * f.f2.deriv(1) - f.f1.deriv(1) * f.f2.deriv(0)


def compose(f: PlaneMap, g: PlaneMap, order=None) -> PlaneMap:
    """f after g, optionally truncated at total degree `order`."""
    return PlaneMap(
        f.f1.subs(g.f1, g.f2, order),
        f.f2.subs(g.f1, g.f2, order),
        f.kind,
    )


def compose_truncated(f: PlaneMap, g: PlaneMap, order: int) -> PlaneMap:
    if f.kind != "local-germ" or g.kind != "local-germ":
        raise ValdynError("truncated composition is for local germs")
    return compose(f, g, order)


def mult_sequence(f: PlaneMap, n_max: int, start_order=16, order_ceiling=1 << 18):
    """[c(f), c(f^2), ..., c(f^n_max)] via adaptively truncated composition.

    Iterates are built as f^(k+1) = f^k o f, substituting the small fixed map
    into the big polynomial.  Every component of f has multiplicity
    >= m = c(f), so a term of f^k that is exact below T yields f^(k+1) exact
    below m*T; each level is therefore recomputed lazily with a truncation
    order kept just above its minimal degree, deepening the lower levels only
    as far as the composition requires.  A computed multiplicity is trusted
    only when strictly below that level's order.
    """
    if f.kind != "local-germ":
        raise ValdynError("mult_sequence needs a local germ")
    if not f.is_dominant():
        raise ValdynError("map is not dominant")
    m = max(min(multiplicity(f.f1), multiplicity(f.f2)), 1)
    cache = {}

    def ensure(k, T):
        """f^k, exact below degree T."""
        if T > order_ceiling:
            raise ResourceLimitError(
                f"truncation ceiling {order_ceiling} exceeded at iterate {k}")
        if k == 1:
            return PlaneMap(f.f1.truncate(T), f.f2.truncate(T), "local-germ")
        got = cache.get(k)
        if got and got[0] >= T:
            return got[1]
        inner = ensure(k - 1, -(-T // m))
        g = compose(inner, f, T)
        cache[k] = (T, g)
        return g

    seq = []
    for k in range(1, n_max + 1):
        # c is supermultiplicative, so the best split gives a lower bound;
        # a thin margin on top of it usually certifies in one pass, and a
        # wrong guess only costs a retry (the c < T check keeps it safe)
        best = max((seq[a - 1] * seq[k - a - 1] for a in range(1, k)),
                   default=0)
        T = -(-17 * best // 16) + start_order
        while True:
            if T > order_ceiling:
                raise ResourceLimitError(
                    f"truncation ceiling {order_ceiling} exceeded at iterate {k}")
            if k == 1:
                g = ensure(1, T)
                o1 = None if g.f1.is_zero() else multiplicity(g.f1)
                o2 = None if g.f2.is_zero() else multiplicity(g.f2)
            else:
                # top level: only the multiplicity is needed, so stream the
                # composition instead of materializing the iterate
                inner = ensure(k - 1, -(-T // m))
                o1 = inner.f1.ord_of_subs(f.f1, f.f2, T)
                o2 = inner.f2.ord_of_subs(f.f1, f.f2, T)
            if o1 is not None and o2 is not None:
                c = min(o1, o2)
                if c < T:
                    break
            T += max(start_order, T // 8)
        seq.append(c)
    return seq


def deg_sequence(F: PlaneMap, n_max: int):
    """[deg(F), ..., deg(F^n_max)] by full symbolic composition."""
    if F.kind != "affine":
        raise ValdynError("deg_sequence needs an affine map")
    budget = term_budget()
    seq = []
    g = F
    for k in range(n_max):
        seq.append(max(g.f1.degree(), g.f2.degree()))
        if k + 1 < n_max:
            g = compose(F, g)
            if len(g.f1.terms) + len(g.f2.terms) > budget:
                raise ResourceLimitError(
                    f"term budget {budget} exceeded at iterate {k + 2}"
                )
    return seq


def at_infinity_transform(P: BiPoly) -> BiPoly:
    """P~(z, w) = z^deg(P) * P(1/z, w/z)."""
    if P.is_zero():
        raise ValdynError("cannot transform the zero polynomial")
    d = P.degree()
    return BiPoly.make({(d - i - j, j): c for (i, j), c in P.terms.items()})


def from_infinity_transform(Pt: BiPoly, D: int) -> BiPoly:
    """X^D * P~(1/X, Y/X): left inverse of at_infinity_transform for D >= deg."""
    if Pt.degree() > D:
        raise ValdynError("D smaller than the degree")
    return BiPoly.make({(D - i - j, j): c for (i, j), c in Pt.terms.items()})
