"""The logarithmic embedding, the unit matrix, regulator, Weil height, the
degree-dependent height floor, and certified classification of log vectors
into sector interiors, edges, or outside.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from gmpy2 import mpfr, mpq

from .errors import (CertificateMismatch, DependentUnits, InternalError,
                     NotAUnit, PrecisionExceeded, RankZero, WrongRank,
                     ZeroElement)
from .intervals import Interval, ctx_down, ctx_up, iv_sum, mpfr_down, mpfr_up
from .fields import (FieldElement, NumberField, certify_real_at, embed,
                     field_norm, minimal_polynomial, modulus_sign_at,
                     value_sign_at)
from .polys import is_reciprocal

_GUARD = 10_000


# ---------------------------------------------------------------------------
# log vectors and the unit matrix


@dataclass(frozen=True)
class LogVector:
    """Interval image of a nonzero element under the log embedding: entry i
    encloses log|sigma_i| for real embeddings and 2 log|tau_i| for complex
    ones (entries follow the stored embedding order)."""

    entries: tuple
    precision_bits: int

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def sum(self):
        p = self.precision_bits + 16
        return iv_sum(self.entries, p)


def log_embedding(a: FieldElement, field: NumberField, precision=None) -> LogVector:
    """Certified LogVector of a, entry widths below 2^-precision."""
    if a.is_zero():
        raise ZeroElement("log embedding of zero")
    p = precision or field.precision.bits
    tol = mpfr_up(mpq(1, 2) ** p, 64)
    entries = []
    for i in range(field.embedding_count):
        work = p + 16
        for _ in range(_GUARD):
            m2 = embed(a, i + 1, field, work).abs_squared()
            if m2.lo > 0:
                lg = m2.log(work)
                entry = lg.scale(mpq(1, 2), work) if i < field.r1 else lg
                if entry.width() <= tol:
                    entries.append(entry)
                    break
            work = work * 2
        else:
            raise PrecisionExceeded("log embedding did not converge")
    return LogVector(tuple(entries), p)


class UnitMatrix:
    """(r+1) x r interval matrix whose column j is the LogVector of unit j."""

    def __init__(self, entries, units, field, prec):
        self.entries = entries          # rows: r+1 lists of r Intervals
        self.units = tuple(units)
        self.field = field
        self.prec = prec
        self.r = len(units)

    def row(self, i):
        return self.entries[i]

    def column(self, j):
        return [self.entries[i][j] for i in range(len(self.entries))]

    def refresh(self, prec):
        if prec <= self.prec:
            return self
        cols = [log_embedding(u, self.field, prec) for u in self.units]
        entries = [[cols[j][i] for j in range(self.r)]
                   for i in range(self.field.embedding_count)]
        return UnitMatrix(entries, self.units, self.field, prec)

    def row_norm(self, i, prec=None):
        """Euclidean norm of row i as an interval."""
        p = prec or self.prec
        sq = [e.square(p) for e in self.row(i)]
        return iv_sum(sq, p).sqrt(p) if sq else Interval.zero()


def interval_det(rows, prec):
    """Interval determinant by Gaussian elimination; None when a pivot cannot
    be bounded away from zero at this precision."""
    n = len(rows)
    if n == 0:
        return Interval.from_rational(1, prec)
    m = [list(r) for r in rows]
    acc = Interval.from_rational(1, prec)
    sign = 1
    for col in range(n):
        piv, best = None, None
        for r in range(col, n):
            mig = m[r][col].mignitude()
            if mig > 0 and (best is None or mig > best):
                piv, best = r, mig
        if piv is None:
            return None
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        pivot = m[col][col]
        acc = acc.mul(pivot, prec)
        for r in range(col + 1, n):
            if m[r][col].lo == 0 and m[r][col].hi == 0:
                continue
            factor = m[r][col].div(pivot, prec)
            for c in range(col + 1, n):
                m[r][c] = m[r][c].sub(factor.mul(m[col][c], prec), prec)
    return acc if sign > 0 else acc.neg()


def build_unit_matrix(units, field: NumberField, precision=None) -> UnitMatrix:
    """Assemble the unit matrix, verifying norms, column sums and independence
    (escalating precision for the determinant certificates)."""
    us = list(getattr(units, "units", units))
    p = precision or field.precision.bits
    r_expected = field.unit_rank
    if len(us) != r_expected:
        raise WrongRank(f"got {len(us)} units, expected rank {r_expected}")
    for u in us:
        if field_norm(u, field) not in (1, -1):
            raise NotAUnit(f"norm {field_norm(u, field)} != +-1")
    cols = [log_embedding(u, field, p) for u in us]
    entries = [[cols[j][i] for j in range(len(us))]
               for i in range(field.embedding_count)]
    A = UnitMatrix(entries, us, field, p)
    for j in range(A.r):
        if not iv_sum(A.column(j), p + 16).contains_zero():
            raise InternalError("unit column sum excludes zero")
    _verify_independence(A)
    return A


def _verify_independence(A: UnitMatrix):
    if A.r == 0:
        return
    cur = A
    for prec in A.field.precision.ladder():
        cur = cur.refresh(prec)
        ok = True
        for drop in range(A.r + 1):
            rows = [cur.row(i) for i in range(A.r + 1) if i != drop]
            det = interval_det(rows, prec)
            if det is None or det.contains_zero():
                ok = False
                break
        if ok:
            A.entries = cur.entries
            A.prec = cur.prec
            return
    raise DependentUnits("an r x r minor cannot be bounded away from zero "
                         "at the precision ceiling")


def regulator(A: UnitMatrix) -> Interval:
    """|det| of A with one row deleted (independent of the choice)."""
    if A.r == 0:
        raise RankZero("regulator of a rank-0 unit group")
    cur = A
    for prec in A.field.precision.ladder():
        cur = cur.refresh(prec)
        det = interval_det([cur.row(i) for i in range(1, A.r + 1)], prec)
        if det is not None and not det.contains_zero():
            return det.abs()
    raise PrecisionExceeded("regulator not certified")  # unreachable after build


# ---------------------------------------------------------------------------
# heights


def _logplus_of_squared(m2: Interval, prec) -> Interval:
    """Enclosure of log^+ |x| given an enclosure of |x|^2."""
    if m2.hi <= 1:
        return Interval.zero()
    hi = ctx_up(prec).log(m2.hi)
    if m2.lo > 1:
        lo = ctx_down(prec).log(m2.lo)
        if lo < 0:
            lo = mpfr(0)
    else:
        lo = mpfr(0)
    return Interval(lo, hi).scale(mpq(1, 2), prec)


def weil_height(a: FieldElement, field: NumberField, precision=None) -> Interval:
    """Enclosure of the absolute logarithmic Weil height of an algebraic
    integer: (1/n) * (sum of log^+ over real embeddings + doubled log^+ over
    complex ones)."""
    if a.is_zero():
        raise ZeroElement("height of zero")
    p = precision or field.precision.bits
    tol = mpfr_up(mpq(1, 2) ** p, 64)
    work = p + 16
    for _ in range(_GUARD):
        terms = []
        for i in range(field.embedding_count):
            m2 = embed(a, i + 1, field, work).abs_squared()
            lp = _logplus_of_squared(m2, work)
            terms.append(lp if i < field.r1 else lp.scale(2, work))
        h = iv_sum(terms, work).div_int(field.n, work)
        if h.width() <= tol:
            return h
        work *= 2
    raise PrecisionExceeded("height did not converge")


def delta(n: int) -> mpq:
    """Dyadic lower bound for the raw height floor of degree-n non-torsion
    units: (1/(4n)) (log log n / log n)^3 for even n >= 4, log(1.32)
    otherwise.  Rounded down, at a fixed internal precision, so the induced
    constraint is only ever weaker than the true bound."""
    if n < 2:
        raise ValueError("delta needs n >= 2")
    p = 128
    cd, cu = ctx_down(p), ctx_up(p)
    if n >= 4 and n % 2 == 0:
        ln_lo = cd.log(mpfr(n, p))
        ln_hi = cu.log(mpfr(n, p))
        lnln_lo = cd.log(ln_lo)
        ratio = cd.div(lnln_lo, ln_hi)
        cube = cd.mul(cd.mul(ratio, ratio), ratio)
        return mpq(cd.div(cube, mpfr(4 * n, p)))
    x = mpfr_down(mpq(33, 25), p)
    return mpq(cd.log(x))


# ---------------------------------------------------------------------------
# region classification


class NumberClass(Enum):
    PISOT = "Pisot"
    SALEM = "Salem"
    COMPLEX_PISOT = "ComplexPisot"
    PISOT_OF_REAL_SUBFIELD = "PisotOfRealSubfield"
    TORSION = "Torsion"
    OTHER = "Other"


@dataclass(frozen=True)
class RegionTag:
    """Certified location of a log vector relative to sector k: interior,
    an edge ell_{k,j}, other boundary, outside, or the origin."""

    kind: str          # 'InteriorQ' | 'Edge' | 'Boundary_other' | 'Outside' | 'Zero'
    k: int = None      # 1-based embedding index
    j: int = None      # 1-based edge partner for kind == 'Edge'

    @staticmethod
    def interior(k):
        return RegionTag("InteriorQ", k=k)

    @staticmethod
    def edge(k, j):
        return RegionTag("Edge", k=k, j=j)

    @staticmethod
    def zero():
        return RegionTag("Zero")

    @staticmethod
    def outside():
        return RegionTag("Outside")

    @staticmethod
    def boundary_other():
        return RegionTag("Boundary_other")

    def is_interior(self):
        return self.kind == "InteriorQ"

    def is_edge(self):
        return self.kind == "Edge"

    def is_zero(self):
        return self.kind == "Zero"


def entry_signs(a: FieldElement, field: NumberField):
    """Exact sign of every log-embedding entry of a (sign of |phi_i(a)| - 1).

    Interval certification with precision escalation first; entries still
    undecided at the ceiling are settled by exact algebraic procedures.
    """
    n_emb = field.embedding_count
    signs = [None] * n_emb
    for prec in field.precision.ladder():
        undecided = [i for i in range(n_emb) if signs[i] is None]
        if not undecided:
            break
        for i in undecided:
            m2 = embed(a, i + 1, field, prec).abs_squared()
            if m2.lo > 1:
                signs[i] = 1
            elif m2.hi < 1:
                signs[i] = -1
    for i in range(n_emb):
        if signs[i] is None:
            signs[i] = modulus_sign_at(a, i + 1, field)
    return signs


def tag_from_signs(signs, k) -> RegionTag:
    """Pure sign-pattern classification relative to sector k (1-based)."""
    ki = k - 1
    if all(s == 0 for s in signs):
        return RegionTag.zero()
    if signs[ki] <= 0:
        return RegionTag.outside()
    if any(s > 0 for i, s in enumerate(signs) if i != ki):
        return RegionTag.outside()
    negs = [i for i, s in enumerate(signs) if s < 0 and i != ki]
    zeros = [i for i, s in enumerate(signs) if s == 0 and i != ki]
    if not zeros:
        return RegionTag.interior(k)
    if len(negs) == 1:
        return RegionTag.edge(k, negs[0] + 1)
    return RegionTag.boundary_other()


def region_classify(a: FieldElement, k: int, field: NumberField) -> RegionTag:
    """Certified region tag of the log vector of a unit a."""
    if a.is_zero():
        raise ZeroElement
    return tag_from_signs(entry_signs(a, field), k)


# ---------------------------------------------------------------------------
# number classification with exact certificates


def _root_counts(m, field):
    """(outside, on_circle, inside) root counts of m over the closed unit
    disk boundary, with conjugate pairs counted twice; fully exact."""
    iso = field.isolated(m)
    outside = circle = inside = 0
    for i in range(iso.nstored):
        w = 1 if i < iso.r1 else 2
        s = iso.modulus_vs_one(i)
        if s == 0:
            circle += w
        elif s > 0:
            outside += w
        else:
            inside += w
    if outside + circle + inside != m.degree:
        raise InternalError("root count mismatch")
    return outside, circle, inside


def classify_number(a: FieldElement, k: int, field: NumberField) -> NumberClass:
    """Classification of phi_k(a) per the sector of its log vector, with every
    certificate re-checked against exact minimal-polynomial root counts."""
    tag = region_classify(a, k, field)
    if tag.kind not in ("InteriorQ", "Edge", "Zero"):
        raise ValueError(f"classify_number needs interior/edge/zero region, got {tag.kind}")
    m = minimal_polynomial(a, field)
    outside, circle, inside = _root_counts(m, field)
    if tag.is_zero():
        if circle != m.degree:
            raise CertificateMismatch("zero log vector but roots off the unit circle")
        return NumberClass.TORSION
    if tag.is_interior():
        if k <= field.r1:
            if m.degree != field.n or outside != 1 or circle != 0:
                raise CertificateMismatch(
                    f"interior sector at real embedding: expected one root outside, "
                    f"none on circle, degree {field.n}; got deg={m.degree}, "
                    f"outside={outside}, circle={circle}")
            return NumberClass.PISOT if value_sign_at(a, k, field) > 0 else NumberClass.OTHER
        if not certify_real_at(a, k, field):
            if m.degree != field.n or outside != 2 or circle != 0:
                raise CertificateMismatch(
                    f"interior sector at complex embedding: expected one pair outside; "
                    f"got deg={m.degree}, outside={outside}, circle={circle}")
            return NumberClass.COMPLEX_PISOT
        if m.degree * 2 != field.n or outside != 1 or circle != 0:
            raise CertificateMismatch(
                f"real value at complex embedding: expected degree {field.n}//2; "
                f"got deg={m.degree}, outside={outside}, circle={circle}")
        return (NumberClass.PISOT_OF_REAL_SUBFIELD
                if value_sign_at(a, k, field) > 0 else NumberClass.OTHER)
    # edges
    if k > field.r1:
        return NumberClass.OTHER  # no classification is claimed at complex-k edges
    if (m.degree != field.n or outside != 1 or circle != m.degree - 2
            or not is_reciprocal(m)):
        raise CertificateMismatch(
            f"edge at real embedding: expected reciprocal with deg-2 circle roots; "
            f"got deg={m.degree}, outside={outside}, circle={circle}, "
            f"reciprocal={is_reciprocal(m)}")
    return NumberClass.SALEM if value_sign_at(a, k, field) > 0 else NumberClass.OTHER
