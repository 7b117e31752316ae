"""Exception hierarchy.

Every library error derives from PkrError and carries a stable ``kind``
string (the class name) that the CLI serializes into its error payload.
"""

class PkrError(Exception):
    """Base class for all library errors."""

    @property
    def kind(self) -> str:
        return type(self).__name__


# --- metric space validation ------------------------------------------------

class AsymmetryError(PkrError):
    """Distance matrix differs from its transpose beyond tolerance."""


class TriangleViolation(PkrError):
    """Triangle inequality fails; message reports the worst (i, k, j) triple."""


class ZeroOffDiagonal(PkrError):
    """Two distinct points at (near-)zero distance."""


class NegativeDistance(PkrError):
    """Distance matrix has a negative entry."""


class DimensionMismatch(PkrError):
    """Coordinate vectors of unequal length."""


class IndexOutOfRange(PkrError):
    """Point index outside the space."""


class SpaceMismatch(PkrError):
    """Operands are bound to different space instances."""


# --- solvers ------------------------------------------------------------------

class NonZeroCharge(PkrError):
    """Measure has nonzero total charge where zero charge is required."""


class NumericalFailure(PkrError):
    """Flow solver safeguard tripped (pivot cap, infeasible basis, bad duals)."""


class NegativeLambda(PkrError):
    """Scalarization weight must be nonnegative."""


class InvalidP(PkrError):
    """p outside [1, inf]."""


class InvalidQ(PkrError):
    """q outside [1, inf]."""


class ConjugacyError(PkrError):
    """p and q are not Holder conjugates."""


class ToleranceNotMet(PkrError):
    """Requested duality gap not reached; best primal/dual pair attached."""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


# --- certification -------------------------------------------------------------

class DivergenceMismatch(PkrError):
    """Plan divergence disagrees with the proposed decomposition."""


class OrderError(PkrError):
    """Exponent pair out of order (p1 > p2)."""


# --- oracles ---------------------------------------------------------------------

class TooManyAtoms(PkrError):
    """Rational measure exceeds the brute-force atom cap."""


class TooLarge(PkrError):
    """Instance exceeds the oracle's size limit."""


# --- input files ------------------------------------------------------------------

class SchemaError(PkrError):
    """Input file does not match the documented JSON schema."""
