"""Exception taxonomy. Every certified-computation failure mode gets its own class
so the CLI can map them to stable exit codes."""


class PisotUnitError(Exception):
    """Base class for all library errors."""


# -- exact arithmetic / polynomials ------------------------------------------

class ZeroElement(PisotUnitError):
    """Operation requires a nonzero field element."""


class NotSquarefree(PisotUnitError):
    """gcd(f, f') is non-constant."""


class ZeroConstantTerm(PisotUnitError):
    """Unit-circle root counting needs p(0) != 0."""


class InternalError(PisotUnitError):
    """Invariant violated; indicates a bug or an invalid field (e.g. reducible
    defining polynomial surfacing as a non-invertible element)."""


# -- unit system validation ---------------------------------------------------

class NotAUnit(PisotUnitError):
    """Element has field norm different from +-1."""


class DependentUnits(PisotUnitError):
    """Supplied units are multiplicatively dependent (some minor of the log
    matrix cannot be bounded away from zero)."""


class BadTorsion(PisotUnitError):
    """Claimed torsion generator/order do not check out."""


class WrongRank(PisotUnitError):
    """Number of supplied units differs from r1 + r2 - 1."""


class RankZero(PisotUnitError):
    """Operation needs unit rank >= 1."""


# -- integer programming -------------------------------------------------------

class Infeasible(PisotUnitError):
    """No integer point satisfies the constraints inside the bounded region."""


class UnboundedRegion(PisotUnitError):
    """Search region not provably bounded and no objective cap / warm start given."""


class SingularSystem(PisotUnitError):
    """Homogeneous constraint block is singular (or not certifiably regular)."""


class NoFallbackProvided(PisotUnitError):
    """An interval comparison stayed undecided at the precision ceiling and no
    exact decision callback was supplied."""


# -- certification -------------------------------------------------------------

class CertificateMismatch(PisotUnitError):
    """Interval classification and exact minimal-polynomial certificates
    disagree.  Hard error: the two routes are independent and must agree."""


class PrecisionExceeded(PisotUnitError):
    """A strict sign could not be certified even far past the precision ceiling."""


class NoGenerator(PisotUnitError):
    """The field admits no complex Pisot unit generator (for the requested
    embedding).  ``reason`` is 'RankZero' or 'AllUnitsReal'."""

    def __init__(self, reason, message=None):
        self.reason = reason
        super().__init__(message or f"no complex Pisot generator: {reason}")


class ParseError(PisotUnitError):
    """Field description file is malformed."""
