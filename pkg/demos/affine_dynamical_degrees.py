"""Walkthrough: dynamical degree of a plane polynomial map.

Three maps with three different behaviours at infinity: a monomial map fixing
the degree valuation, the Fibonacci map whose eigenvaluation is irrational,
and a skew product whose degree sequence grows like n * 2^n.
"""

from valdyn import (
    AffineValuation,
    affine_eigenvaluation_search,
    d_of,
    skew_dichotomy,
    v1_certificate,
)
from valdyn.dynaffine import reconstruct_affine_image
from valdyn.poly import deg_sequence, parse_map

for text in ("(X^2, Y^2)", "(Y, X*Y)", "(X^2, (1+X)*Y^2)"):
    F = parse_map(text, "affine")
    print("map:", F.render())
    print("  deg(F^n):", deg_sequence(F, 6))

    r = affine_eigenvaluation_search(F)
    print("  dynamical degree:", r.rate)
    print("  eigenvaluation:", r.eigen.render())
    print("  normal form:", r.normal_form, "dichotomy:", r.dichotomy)

    # the eigenvaluation lives in the admissible cone at infinity
    cert = v1_certificate(r.eigen)
    print("  certificate:", cert["status"])

    # degrees factor through the orbit of -deg: deg(F^n) = prod d(F, nu_k)
    nu = AffineValuation.neg_deg()
    prod = 1
    for n in range(4):
        d = d_of(F, nu)
        prod = prod * d
        print(f"  d(F, nu_{n}) = {d}, running product {prod}")
        nu = reconstruct_affine_image(F, nu)

    d = skew_dichotomy(F, r, 6)
    print("  dichotomy evidence: degs", d["degs"])
    if r.dichotomy == "bounded-ratio":
        print("  observed deg(F^n)/rate^n ceiling:", d["observed_D"])
    else:
        print("  deg(F^n)/rate^n keeps growing:", d["ratios"])
        print("  degree drops at infinity at:", d["drop_points"])
    print()
