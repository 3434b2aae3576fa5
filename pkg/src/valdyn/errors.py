"""Exception hierarchy shared by all valdyn modules."""


class ValdynError(Exception):
    """Base class for all library errors."""


class ParseError(ValdynError):
    """Malformed textual input (polynomials, valuations, CLI arguments)."""


class FieldMismatchError(ValdynError):
    """Arithmetic between incompatible quadratic fields."""


class DegenerateMatrixError(ValdynError):
    """2x2 matrix with ad = bc where a nondegenerate one is required."""


class SkpAxiomError(ValdynError):
    """A key polynomial sequence violates one of the defining axioms."""

    def __init__(self, stage, message):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage


class NotDivisorialError(ValdynError):
    """Operation requires a valuation with all-rational values."""


class ContractedCurveError(ValdynError):
    """The valuation is a contracted curve for the given map."""


class AlgebraicExtensionNeeded(ValdynError):
    """The search would leave Q; keys with irrational coefficients required."""


class ResourceLimitError(ValdynError):
    """A configured budget (truncation order, term count, depth) was hit."""


class FalsificationError(ValdynError):
    """An identity the theory guarantees failed; indicates a wrong result."""


class InconsistencyError(ValdynError):
    """Input data is internally inconsistent (e.g. not a pencil valuation)."""
