"""Exception types shared across the package."""


class HyperdiscError(Exception):
    """Base class for all package errors."""


class ZeroPolynomial(HyperdiscError):
    """An operation required a nonzero polynomial."""


class NotRealRooted(HyperdiscError):
    """A polynomial that must be real-rooted has certified complex roots.

    Raised by root extraction when the exact Sturm count falls short of the
    degree; for spectral computations this signals a construction bug (the
    instance is not hyperbolic in the claimed direction), never a tolerance
    issue that should be patched silently.
    """


class DuplicateNode(HyperdiscError):
    """Interpolation nodes share an abscissa."""


class DimensionMismatch(HyperdiscError):
    """Vector length does not match the ambient dimension."""


class RankTooHigh(HyperdiscError):
    """A vector required to have hyperbolic rank <= 1 does not."""


class IndexOutOfRange(HyperdiscError):
    """Variable index outside the polynomial's variable count."""


class DisconnectedGraph(HyperdiscError):
    """Graph operation requires a connected graph."""


class TooLarge(HyperdiscError):
    """Desk-scale enumeration guardrail exceeded; refusing to approximate."""


class ValueNotInSupport(HyperdiscError):
    """Assignment value is not in the variable's support."""


class EmptyBranch(HyperdiscError):
    """No support set extends the given partial assignment."""


class DegreeMismatch(HyperdiscError):
    """Polynomials in a common-interlacing check differ in degree."""


class NoAdmissibleChild(HyperdiscError):
    """Family descent found no child within root tolerance.

    Signals a numerical tolerance set too tight or a non-interlacing family;
    raised rather than silently patched.
    """


class NotAboveRoots(HyperdiscError):
    """Barrier evaluation point is not above the roots of the polynomial."""


class InsufficientMargin(HyperdiscError):
    """Finite-difference stencil would leave the above-roots region."""


class ChainViolated(HyperdiscError):
    """A bound-chain precondition fails for the given instance."""

    def __init__(self, step: str, detail: str = ""):
        self.step = step
        self.detail = detail
        super().__init__(f"bound chain precondition violated at {step!r}" + (f": {detail}" if detail else ""))


class NotDeterminantInstance(HyperdiscError):
    """The minor-formula coefficient oracle needs a determinant instance."""


class KTooLarge(HyperdiscError):
    """Requested coefficient count exceeds the desk-scale oracle cap."""


class OddK(HyperdiscError):
    """Largest-root estimation requires an even power-sum index."""


class OracleFailure(HyperdiscError):
    """Coefficient oracle failed during blocked search."""


class CertificationFailed(HyperdiscError):
    """Post-hoc exact certification exceeded the promised bound."""

    def __init__(self, certified: float, bound: float):
        self.certified = certified
        self.bound = bound
        super().__init__(f"certified root {certified!r} exceeds bound {bound!r}")


class InvalidParams(HyperdiscError):
    """Instance generator parameters outside desk guardrails."""
