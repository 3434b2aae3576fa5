"""Piecewise-linear potentials along tree segments and piecewise-Moebius maps.

A segment of valuations is parameterized by the last SKP value t.  The value
t -> nu_t(P) is then a lower envelope of lines (intercept + slope*t) with
rational intercepts and integer slopes: every min in the evaluation recursion
involves t only through the top stage.  Quotients of two such potentials give
piecewise-Moebius self-maps whose fixed points are at worst quadratic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateMatrixError, SkpAxiomError, ValdynError
from .numbers import QN
from .poly import BiPoly
from .skpval import (
    INFINITY,
    Skp,
    Valuation,
    expansion_coeffs,
    skp_validate,
    _eval_stage,
)


def _qn(x):
    return QN.of(x)


def _lt(a, b):
    """a < b where b may be the INFINITY marker (open right end)."""
    if b is INFINITY:
        return True
    return a < b


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear function on [breaks[0], breaks[-1]].

    breaks is an increasing tuple of quadratic numbers; the last entry may be
    the INFINITY marker for an unbounded domain.  pieces[i] = (intercept,
    slope) is the line on [breaks[i], breaks[i+1]]; slopes and intercepts are
    exact rationals.
    """

    breaks: tuple
    pieces: tuple

    def __post_init__(self):
        if len(self.pieces) != len(self.breaks) - 1 or not self.pieces:
            raise ValdynError("breaks/pieces length mismatch")
        for i in range(len(self.breaks) - 1):
            if not _lt(self.breaks[i], self.breaks[i + 1]):
                raise ValdynError("breakpoints must be strictly increasing")
        for i in range(1, len(self.pieces)):
            b = self.breaks[i]
            (c0, s0), (c1, s1) = self.pieces[i - 1], self.pieces[i]
            if _qn(c0) + _qn(s0) * b != _qn(c1) + _qn(s1) * b:
                raise ValdynError(f"discontinuity at breakpoint {b}")

    @property
    def lo(self):
        return self.breaks[0]

    @property
    def hi(self):
        return self.breaks[-1]

    @staticmethod
    def constant(c, lo, hi) -> "PiecewiseLinear":
        return PiecewiseLinear((_qn(lo), hi if hi is INFINITY else _qn(hi)),
                               ((Fraction(c), Fraction(0)),))

    @staticmethod
    def line(intercept, slope, lo, hi) -> "PiecewiseLinear":
        return PiecewiseLinear((_qn(lo), hi if hi is INFINITY else _qn(hi)),
                               ((Fraction(intercept), Fraction(slope)),))

    @staticmethod
    def envelope(lines, lo, hi) -> "PiecewiseLinear":
        """Lower envelope of (intercept, slope) lines over [lo, hi]."""
        best = {}
        for c, s in lines:
            c, s = Fraction(c), Fraction(s)
            if s not in best or c < best[s]:
                best[s] = c
        if not best:
            raise ValdynError("empty envelope")
        lo = _qn(lo)
        # for the minimum, steeper lines win on the left; walk slopes downward
        order = sorted(best.items(), key=lambda sc: -sc[0])
        stack = []  # (intercept, slope, start)
        for c, s in ((c, s) for s, c in order):
            start = lo
            while stack:
                c0, s0, t0 = stack[-1]
                if s0 == s:
                    break
                cross = _qn(Fraction(c - c0, s0 - s))
                if not cross > t0:
                    stack.pop()
                    continue
                start = cross
                break
            if stack and stack[-1][1] == s:
                continue
            if _lt(start, hi):
                stack.append((c, s, start))
        breaks = [lo] + [t for _, _, t in stack[1:]] + \
                 [hi if hi is INFINITY else _qn(hi)]
        pieces = [(c, s) for c, s, _ in stack]
        return PiecewiseLinear(tuple(breaks), tuple(pieces))

    def __call__(self, t):
        t = _qn(t)
        if t < self.lo or not (self.hi is INFINITY or t <= self.hi):
            raise ValdynError(f"{t} outside domain")
        for i in range(len(self.pieces)):
            if _lt(t, self.breaks[i + 1]) or t == self.breaks[i + 1]:
                c, s = self.pieces[i]
                return _qn(c) + _qn(s) * t
        c, s = self.pieces[-1]
        return _qn(c) + _qn(s) * t

    def piece_at(self, t):
        """(index, (intercept, slope)) of the piece containing t."""
        t = _qn(t)
        for i in range(len(self.pieces)):
            if _lt(t, self.breaks[i + 1]) or t == self.breaks[i + 1]:
                return i, self.pieces[i]
        raise ValdynError(f"{t} outside domain")

    def _merged_breaks(self, other):
        if self.lo != other.lo or \
           (self.hi is INFINITY) != (other.hi is INFINITY) or \
           (self.hi is not INFINITY and self.hi != other.hi):
            raise ValdynError("domain mismatch")
        import functools
        pts = list(self.breaks[:-1]) + list(other.breaks[1:-1])
        uniq = []
        for p in sorted(pts, key=functools.cmp_to_key(
                lambda u, v: (u > v) - (u < v))):
            if not uniq or p != uniq[-1]:
                uniq.append(p)
        return uniq + [self.hi]

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PiecewiseLinear.constant(other, self.lo, self.hi)
        breaks = self._merged_breaks(other)
        pieces = []
        for i in range(len(breaks) - 1):
            probe = breaks[i]
            _, (c0, s0) = self.piece_at_open(probe)
            _, (c1, s1) = other.piece_at_open(probe)
            pieces.append((c0 + c1, s0 + s1))
        return PiecewiseLinear(tuple(breaks), tuple(pieces))

    def piece_at_open(self, t):
        """Piece valid just to the right of t (t a breakpoint or interior)."""
        t = _qn(t)
        for i in range(len(self.pieces)):
            if _lt(t, self.breaks[i + 1]):
                return i, self.pieces[i]
        raise ValdynError(f"{t} outside domain")

    def scale(self, r) -> "PiecewiseLinear":
        r = Fraction(r)
        if r <= 0:
            raise ValdynError("scale factor must be positive")
        return PiecewiseLinear(
            self.breaks, tuple((c * r, s * r) for c, s in self.pieces))

    def min_with(self, other) -> "PiecewiseLinear":
        breaks = self._merged_breaks(other)
        out_breaks = [breaks[0]]
        out_pieces = []

        def push(b, piece):
            if out_pieces and out_pieces[-1] == piece:
                out_breaks[-1] = b
            else:
                out_pieces.append(piece)
                out_breaks.append(b)

        for i in range(len(breaks) - 1):
            a, b = breaks[i], breaks[i + 1]
            _, (c0, s0) = self.piece_at_open(a)
            _, (c1, s1) = other.piece_at_open(a)
            if (c0, s0) == (c1, s1):
                push(b, (c0, s0))
                continue
            if s0 == s1:
                push(b, (c0, s0) if c0 < c1 else (c1, s1))
                continue
            cross = _qn(Fraction(c1 - c0, s0 - s1))
            # which line is lower just right of a
            lower0 = (_qn(c0) + _qn(s0) * a < _qn(c1) + _qn(s1) * a) or \
                     (_qn(c0) + _qn(s0) * a == _qn(c1) + _qn(s1) * a and s0 < s1)
            low, high = ((c0, s0), (c1, s1)) if lower0 else ((c1, s1), (c0, s0))
            if cross > a and _lt(cross, b):
                push(cross, low)
                push(b, high)
            else:
                push(b, low)
        return PiecewiseLinear(tuple(out_breaks), tuple(out_pieces))

    def is_concave(self) -> bool:
        return all(self.pieces[i][1] >= self.pieces[i + 1][1]
                   for i in range(len(self.pieces) - 1))

    def slopes(self):
        return [s for _, s in self.pieces]

    def restrict(self, lo, hi) -> "PiecewiseLinear":
        lo = _qn(lo)
        hi = hi if hi is INFINITY else _qn(hi)
        breaks = [lo]
        pieces = []
        for i in range(len(self.pieces)):
            a, b = self.breaks[i], self.breaks[i + 1]
            if not _lt(lo, b) and not lo == b:
                continue
            if b is not INFINITY and not _lt(breaks[-1] if pieces else lo, b):
                continue
            end = b if (hi is INFINITY or (b is not INFINITY and b < hi)) else hi
            if pieces and end is not INFINITY and not end > breaks[-1]:
                continue
            pieces.append(self.pieces[i])
            breaks.append(end)
            if not (end is INFINITY) and hi is not INFINITY and end == hi:
                break
            if end is INFINITY:
                break
        return PiecewiseLinear(tuple(breaks), tuple(pieces))

    def render(self, var="t") -> str:
        parts = []
        for i, (c, s) in enumerate(self.pieces):
            seg = f"[{self.breaks[i]}, {self.breaks[i + 1]}]"
            if s == 0:
                expr = str(c)
            elif c == 0:
                expr = f"{s}*{var}" if s != 1 else var
            else:
                expr = f"{c} + {s}*{var}" if s != 1 else f"{c} + {var}"
            parts.append(f"{expr} on {seg}")
        return "; ".join(parts)

    __repr__ = render

    def to_json(self):
        return {
            "breaks": ["inf" if b is INFINITY else b.to_json()
                       for b in self.breaks],
            "pieces": [{"intercept": {"num": c.numerator, "den": c.denominator},
                        "slope": {"num": s.numerator, "den": s.denominator}}
                       for c, s in self.pieces],
        }

    def sample_csv(self, n=50) -> str:
        """Sampled (t, value) rows for external graphing."""
        lo = float(self.lo)
        hi = float(self.hi) if self.hi is not INFINITY else lo + 10.0
        rows = ["t,value"]
        for i in range(n + 1):
            t = lo + (hi - lo) * i / n
            tq = Fraction(t).limit_denominator(10 ** 6)
            tq = max(Fraction(float(self.lo)).limit_denominator(10 ** 6), tq)
            try:
                v = self(_qn(tq))
            except ValdynError:
                continue
            rows.append(f"{float(tq)},{float(v)}")
        return "\n".join(rows) + "\n"


# -- segment potentials --------------------------------------------------------

def _symbolic_lines(skp: Skp, P: BiPoly):
    """nu_t(P) with the last value symbolic, as (intercept, slope) lines."""
    k = skp.depth
    if P.is_zero():
        raise ValdynError("zero polynomial has no finite potential")
    if k == 1:
        return [(Fraction(i), Fraction(j)) for (i, j) in P.terms]
    lines = []
    for j, phi in enumerate(expansion_coeffs(P, skp.keys[k])):
        if phi.is_zero():
            continue
        v = _eval_stage(skp, k - 1, phi)
        if v is INFINITY:
            continue
        if not v.is_rational:
            raise ValdynError("prefix stages must carry rational values")
        lines.append((v.as_rational(), Fraction(j)))
    return lines


def admissible_floor(skp: Skp):
    """Smallest admissible last value for skp's final stage."""
    k = skp.depth
    if k == 1:
        return QN.of(1) if skp.chart == "local" else QN.of(0)
    data = skp_validate(skp.truncated_at(k - 1))
    return QN.of(data.n[-1]) * skp.values[k - 1]


def potential_on_segment(prefix: Skp, P: BiPoly, lo, hi) -> PiecewiseLinear:
    """The exact map t -> nu_t(P) where nu_t replaces prefix's last value by t."""
    lo = _qn(lo)
    floor = admissible_floor(prefix)
    if lo < floor:
        raise SkpAxiomError(prefix.depth,
                            f"range start {lo} below admissible floor {floor}")
    if prefix.depth > 1:
        skp_validate(prefix.truncated_at(prefix.depth - 1))
    lines = _symbolic_lines(prefix, P)
    return PiecewiseLinear.envelope(lines, lo, hi)


def pl_algebra(op: str, *args) -> PiecewiseLinear:
    """Dispatch form: op in {min, sum, scale}."""
    if op == "min":
        f, g = args
        return f.min_with(g)
    if op == "sum":
        f, g = args
        return f + g
    if op == "scale":
        f, r = args
        return f.scale(r)
    raise ValdynError(f"unknown op {op!r}")


# -- piecewise-Moebius maps ----------------------------------------------------

@dataclass(frozen=True)
class PiecewiseMoebius:
    """Per piece t -> (a + b*t)/(c + d*t); same break conventions as PL."""

    breaks: tuple
    pieces: tuple  # (a, b, c, d) Fractions

    def __post_init__(self):
        for i, (a, b, c, d) in enumerate(self.pieces):
            # constant pieces (b = d = 0) arise from retractions and are kept
            if a * d == b * c and not (b == 0 and d == 0 and c != 0):
                raise DegenerateMatrixError(
                    f"piece {i}: degenerate Moebius ({a},{b},{c},{d})")

    @property
    def lo(self):
        return self.breaks[0]

    @property
    def hi(self):
        return self.breaks[-1]

    def __call__(self, t):
        t = _qn(t)
        for i in range(len(self.pieces)):
            if _lt(t, self.breaks[i + 1]) or t == self.breaks[i + 1]:
                a, b, c, d = self.pieces[i]
                return (_qn(a) + _qn(b) * t) / (_qn(c) + _qn(d) * t)
        raise ValdynError(f"{t} outside domain")

    def nonnegative_representative(self, i: int):
        """Scaled-integer (a,b,c,d) with all entries >= 0, or None."""
        a, b, c, d = self.pieces[i]
        from math import lcm
        m = lcm(a.denominator, b.denominator, c.denominator, d.denominator)
        ints = [int(a * m), int(b * m), int(c * m), int(d * m)]
        from math import gcd
        g = 0
        for v in ints:
            g = gcd(g, abs(v))
        if g:
            ints = [v // g for v in ints]
        if all(v >= 0 for v in ints):
            return tuple(ints)
        if all(v <= 0 for v in ints):
            return tuple(-v for v in ints)
        return None

    def render(self, var="t") -> str:
        parts = []
        for i, (a, b, c, d) in enumerate(self.pieces):
            num = _lin_str(a, b, var)
            den = _lin_str(c, d, var)
            parts.append(f"({num})/({den}) on "
                         f"[{self.breaks[i]}, {self.breaks[i + 1]}]")
        return "; ".join(parts)

    __repr__ = render

    def to_json(self):
        return {
            "breaks": ["inf" if b is INFINITY else b.to_json()
                       for b in self.breaks],
            "pieces": [{"a": str(a), "b": str(b), "c": str(c), "d": str(d),
                        "nonnegative_form": self.nonnegative_representative(i)}
                       for i, (a, b, c, d) in enumerate(self.pieces)],
        }


def _lin_str(c0, c1, var):
    if c1 == 0:
        return str(c0)
    term = var if c1 == 1 else f"{c1}*{var}"
    return term if c0 == 0 else f"{c0} + {term}"


def induced_moebius(numerator: PiecewiseLinear, cpotential: PiecewiseLinear,
                    m_psi: int) -> PiecewiseMoebius:
    """numerator / (m_psi * cpotential), piece by piece."""
    if m_psi < 1:
        raise ValdynError("multiplicity must be >= 1")
    breaks = numerator._merged_breaks(cpotential)
    pieces = []
    for i in range(len(breaks) - 1):
        probe = breaks[i]
        _, (cn, sn) = numerator.piece_at_open(probe)
        _, (cd, sd) = cpotential.piece_at_open(probe)
        at_left = _qn(cd) + _qn(sd) * probe
        # allow a zero only at an open left end with positive slope
        if not at_left > 0 and not (at_left == 0 and sd > 0):
            raise ValdynError(f"denominator not positive at {probe}")
        if cn * sd == sn * cd:
            # numerator proportional to denominator: a constant piece
            lam = Fraction(cn, cd * m_psi) if cd else Fraction(sn, sd * m_psi)
            pieces.append((Fraction(lam.numerator), Fraction(0),
                           Fraction(lam.denominator), Fraction(0)))
        else:
            pieces.append((cn, sn, cd * m_psi, sd * m_psi))
    return PiecewiseMoebius(tuple(breaks), tuple(pieces))


def moebius_fixed_points(pm: PiecewiseMoebius):
    """Exact fixed points per piece, with attraction and involution flags.

    Returns a list of dicts {t, attracting, involutive, piece}.  An identity
    piece contributes a single entry with t=None and the everywhere-fixed flag.
    """
    out = []
    for i, (a, b, c, d) in enumerate(pm.pieces):
        lo, hi = pm.breaks[i], pm.breaks[i + 1]
        involutive = (a * (b + c) == 0 and d * (b + c) == 0 and b * b == c * c)
        if a == 0 and d == 0 and b == c:
            out.append({"t": None, "attracting": False,
                        "involutive": True, "everywhere_fixed": True,
                        "piece": i})
            continue
        roots = []
        if d == 0:
            if c != b:
                roots.append(_qn(Fraction(a, c - b)))
        else:
            disc = (c - b) * (c - b) + 4 * d * a
            if disc >= 0:
                num = disc.numerator * disc.denominator
                root = QN.sqrt_of(num) / disc.denominator if num else QN.of(0)
                for sgn in (1, -1):
                    cand = (_qn(b - c) + sgn * root) / (2 * d)
                    if cand not in roots:
                        roots.append(cand)
        for t in roots:
            if t < lo or not (_lt(t, hi) or t == hi):
                continue
            den = _qn(c) + _qn(d) * t
            attracting = abs_lt(_qn(b * c - a * d), den * den)
            out.append({"t": t, "attracting": attracting,
                        "involutive": involutive, "everywhere_fixed": False,
                        "piece": i})
    return out


def abs_lt(x: QN, y: QN) -> bool:
    """|x| < y with exact arithmetic."""
    return x < y and -x < y
