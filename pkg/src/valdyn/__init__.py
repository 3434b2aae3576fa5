"""valdyn: exact valuative dynamics of plane polynomial maps.

Computes asymptotic attraction rates of superattracting fixed-point germs and
dynamical degrees of polynomial maps of the affine plane, with exact
arithmetic throughout: rates are quadratic integers, eigenvaluations are
returned as explicit key polynomials with quadratic values.
"""

from .errors import (
    AlgebraicExtensionNeeded,
    ContractedCurveError,
    DegenerateMatrixError,
    FalsificationError,
    FieldMismatchError,
    InconsistencyError,
    NotDivisorialError,
    ParseError,
    ResourceLimitError,
    SkpAxiomError,
    ValdynError,
)
from .numbers import QN, QuadraticInteger, QuadraticNumber, spectral_radius_2x2
from .poly import (
    BiPoly,
    NewtonDiagram,
    PlaneMap,
    deg_sequence,
    jacobian_det,
    mult_sequence,
    multiplicity,
    parse_map,
    parse_poly,
)
from .skpval import (
    INFINITY,
    Skp,
    Valuation,
    affine_eval,
    generic_multiplicity,
    one_place_certify,
    parse_qn,
    parse_valuation,
    pencil_genus,
    skewness,
    skp_eval,
    skp_validate,
    thinness,
    valuation_multiplicity,
    valuation_to_json,
)
from .potentials import (
    PiecewiseLinear,
    PiecewiseMoebius,
    induced_moebius,
    moebius_fixed_points,
    potential_on_segment,
)
from .cfquad import QuadraInterval, cf_expand, quadra_interval
from .dynlocal import (
    EigenReport,
    attraction_rate,
    critical_tree_ends,
    contracted_curves,
    eigenvaluation_search,
    jacobian_identity_check,
    pushforward_eval,
    verify_bounds,
)
from .dynaffine import (
    AffineReport,
    AffineValuation,
    act_pol_check,
    affine_eigenvaluation_search,
    affine_jacobian_check,
    affine_pushforward_eval,
    d_of,
    skew_dichotomy,
    v1_certificate,
)

__version__ = "0.1.0"
