"""Walkthrough: attraction rate of a superattracting fixed-point germ.

The germ f = (x^2 y^3 + x^7, x^7) contracts every curve through the origin.
Iterating it multiplies orders of vanishing by roughly c_inf per step; this
script finds the exact growth rate by locating the valuation that f fixes.
"""

from fractions import Fraction

from valdyn import (
    Skp,
    Valuation,
    eigenvaluation_search,
    induced_moebius,
    moebius_fixed_points,
    mult_sequence,
    potential_on_segment,
    pushforward_eval,
    verify_bounds,
)
from valdyn.poly import BiPoly, parse_map

f = parse_map("(x^2*y^3+x^7, x^7)", "local-germ")
print("germ:", f.render())

# the multiplicity sequence c(f^n) grows by a factor tending to c_inf
cs = mult_sequence(f, 4)
print("c(f^n) for n <= 4:", cs)
print("ratios:", [round(b / a, 4) for a, b in zip(cs, cs[1:])])

# on the segment of monomial valuations nu_{1,t} the action of f is a
# Moebius map in t; its attracting fixed point is the eigenvaluation
X, Y = BiPoly.var(0), BiPoly.var(1)
prefix = Skp("local", (X, Y), (1, 1))
lo, hi = 1, Fraction(3, 2)
num = potential_on_segment(prefix, f.f2, lo, hi)
cpot = potential_on_segment(prefix, f.f1, lo, hi).min_with(num)
segment_map = induced_moebius(num, cpot, 1)
print("induced segment map:", segment_map.render())
for fp in moebius_fixed_points(segment_map):
    print("fixed point t =", fp["t"], "attracting:", fp["attracting"])

report = eigenvaluation_search(f)
print("eigenvaluation:", report.eigen.render())
print("rate:", report.rate)
print("normal form:", report.normal_form, "with matrix", report.matrix)

# the eigenvaluation really is fixed: compare values on a few polynomials
e = pushforward_eval(f, report.eigen)
for P in (X, Y, X * Y + Y ** 2):
    print(f"  image value on {P.render()}:", e(P))

# and the two-sided bounds delta * c_inf^n <= c(f^n) <= c_inf^n hold exactly
bounds = verify_bounds(f, report, 4)
print("bounds hold, minimal ratio c(f^n)/c_inf^n =", bounds["min_ratio"])
