"""Continued fractions of quadratic irrationals and bracketing intervals.

Given a Moebius map M(t) = (a*t + b)/(c*t + d) with non-negative integer
entries and an irrational positive fixed point t+, quadra_interval produces a
Farey interval [p/q, p'/q'] with p'q - pq' = 1 that contains t+ and is mapped
into itself by M, with denominators as large as requested.  The endpoints come
from convergents of the periodic continued fraction of t+.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .errors import InconsistencyError, ResourceLimitError, ValdynError
from .numbers import QN


def cf_expand(x: QN, max_terms: int = 200):
    """Eventually periodic continued fraction of a quadratic irrational x > 0.

    Returns (preperiod, period) as lists of partial quotients.
    """
    x = QN.of(x)
    if x.is_rational:
        raise ValdynError("continued-fraction state detection needs an irrational")
    if not x > 0:
        raise ValdynError("x must be positive")
    digits = []
    seen = {}
    state = x
    for j in range(max_terms):
        if state in seen:
            i = seen[state]
            return digits[:i], digits[i:]
        seen[state] = j
        a = state.floor()
        digits.append(a)
        state = 1 / (state - a)
    raise ResourceLimitError(f"no period within {max_terms} terms")


def _convergents(preperiod, period, count):
    """First `count` convergents (P_j, Q_j) of the expansion."""
    Pm2, Pm1, Qm2, Qm1 = 0, 1, 1, 0
    out = []
    for j in range(count):
        if j < len(preperiod):
            a = preperiod[j]
        else:
            a = period[(j - len(preperiod)) % len(period)]
        P = a * Pm1 + Pm2
        Q = a * Qm1 + Qm2
        out.append((P, Q))
        Pm2, Pm1, Qm2, Qm1 = Pm1, P, Qm1, Q
    return out


@dataclass(frozen=True)
class QuadraInterval:
    p: int
    q: int
    p2: int
    q2: int
    matrix: tuple      # (a, b, c, d) of M(t) = (a*t+b)/(c*t+d)
    t_plus: QN
    strict: bool       # endpoints map strictly inside the open interval
    k: int             # convergent index used

    def to_json(self):
        return {
            "p": self.p, "q": self.q, "p2": self.p2, "q2": self.q2,
            "matrix": list(self.matrix),
            "t_plus": self.t_plus.to_json(),
            "strict": self.strict,
            "k": self.k,
        }

    def __str__(self):
        return (f"[{self.p}/{self.q}, {self.p2}/{self.q2}] around "
                f"t+ = {self.t_plus} (p'q - pq' = "
                f"{self.p2 * self.q - self.p * self.q2})")


def _moebius(matrix, t):
    a, b, c, d = matrix
    return (QN.of(a) * t + b) / (QN.of(c) * t + d)


def _fixed_points(a, b, c, d):
    """(t_plus, t_minus) of (a*t+b)/(c*t+d); raises when rational or c=0."""
    disc = (a - d) * (a - d) + 4 * b * c
    if c == 0 or disc <= 0 or isqrt(disc) ** 2 == disc:
        raise ValdynError("fixed point is rational; the construction needs "
                          "an irrational quadratic fixed point")
    root = QN.sqrt_of(disc)
    tp = (QN.of(a - d) + root) / (2 * c)
    tm = (QN.of(a - d) - root) / (2 * c)
    return tp, tm


def _check_interval(matrix, tp, p, q, p2, q2):
    """(valid, strict) for the three defining invariants."""
    if min(p, q, p2, q2) < 1:
        return False, False
    if p2 * q - p * q2 != 1:
        return False, False
    lo, hi = QN.of(Fraction(p, q)), QN.of(Fraction(p2, q2))
    if not (lo < tp and tp < hi):
        return False, False
    strict = True
    for end in (lo, hi):
        img = _moebius(matrix, end)
        if img < lo or img > hi:
            return False, False
        if img == lo or img == hi:
            strict = False
    return True, strict


def quadra_interval(abar: int, bbar: int, cbar: int, dbar: int,
                    size_floor: int = 1) -> QuadraInterval:
    """Farey interval around the irrational fixed point, invariant under M."""
    if min(abar, bbar, cbar, dbar) < 0:
        raise ValdynError("matrix entries must be non-negative")
    matrix = (abar, bbar, cbar, dbar)
    tp, tm = _fixed_points(abar, bbar, cbar, dbar)
    if not tp > 0:
        raise ValdynError("positive fixed point required")

    flipped = tp <= 1
    if flipped:
        work = (dbar, cbar, bbar, abar)
        wp, wm = _fixed_points(*work)
    else:
        work = matrix
        wp, wm = tp, tm

    n = (-wm).floor()
    x = wp + n
    pre, per = cf_expand(x)
    l = len(per)
    step = l if l % 2 == 0 else 2 * l
    k = step
    while k < 2:
        k += step

    for _ in range(400):
        conv = _convergents(pre, per, k)
        Pk1, Qk1 = conv[k - 1]
        Pk2, Qk2 = conv[k - 2]
        p2, q2 = Pk1 - n * Qk1, Qk1
        p = (Pk2 - n * Qk2) + n * (Pk1 - n * Qk1)
        q = Qk2 + n * Qk1
        if flipped:
            cand = (q2, p2, q, p)
        else:
            cand = (p, q, p2, q2)
        ok, strict = _check_interval(matrix, tp, *cand)
        if ok and min(cand[1], cand[3]) > size_floor:
            return QuadraInterval(cand[0], cand[1], cand[2], cand[3],
                                  matrix, tp, strict, k)
        if ok:
            k += step
            continue
        # the proof's indexing can be off by one period; try the neighbor
        k += step
    raise InconsistencyError("no invariant interval found; this should "
                             "never happen for valid input")
