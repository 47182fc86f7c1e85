"""Exception hierarchy shared by every module of the package."""


class GammacellError(Exception):
    """Base class for all errors raised by gammacell."""


class DomainMismatch(GammacellError):
    """An affine map was evaluated at a point whose support misses part of its domain."""


class NonRestrictable(GammacellError):
    """Restricting an affine map would drop a nonzero coefficient."""


class EmptySet(GammacellError):
    pass


class EmptyFace(GammacellError):
    pass


class Unbounded(GammacellError):
    pass


class NoThreshold(GammacellError):
    """The function does not tend to +inf at the requested face."""


class InfinitePiece(GammacellError):
    pass


class NotDivergent(GammacellError):
    pass


class InvalidPrecell(GammacellError):
    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.violations) or "invalid precell")


class NotAFacet(GammacellError):
    pass


class CoverMismatch(GammacellError):
    pass


class NotMonohedral(GammacellError):
    pass


class NotAComplex(GammacellError):
    pass


class ClosedInput(GammacellError):
    pass


class NotRelativelyOpen(GammacellError):
    pass


class DiscontinuousEpsilon(GammacellError):
    pass


class BudgetExceeded(GammacellError):
    pass


class SceneError(GammacellError):
    """Malformed or inconsistent scene file."""
