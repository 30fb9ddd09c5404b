"""Exception hierarchy shared by every module."""


class RotcvxError(Exception):
    """Base class for all errors raised by this package."""


class NonFinite(RotcvxError, ValueError):
    """Input contains NaN or infinite entries."""


class DimensionMismatch(RotcvxError, ValueError):
    """Shapes or lengths are inconsistent."""


class DimensionTooLarge(RotcvxError, ValueError):
    """Requested enumeration is beyond the supported size."""


class NotInParityPolytope(RotcvxError, ValueError):
    """Candidate diagonal lies outside the parity polytope."""

    def __init__(self, message, cut=None):
        super().__init__(message)
        self.cut = cut


class NotMajorized(RotcvxError, ValueError):
    """The majorization precondition does not hold."""


class Infeasible(RotcvxError):
    """The constraint set has no point (up to the requested tolerance)."""


class NotFound(Infeasible):
    """An iterative search hit its cap without producing a feasible point."""


class NumericalFailure(RotcvxError):
    """A construction broke down numerically."""


class NotInterior(NumericalFailure):
    """SUT vector is on (or outside) the boundary of the operator-ball projection."""


class SingularBlock(NumericalFailure):
    """A block that must be invertible is (numerically) singular."""


class RankDeficient(NumericalFailure):
    """Vectors are dependent in a way that breaks the triangular support pattern."""


class TooManyVectors(RotcvxError, ValueError):
    """More than n - 1 vectors were supplied."""
