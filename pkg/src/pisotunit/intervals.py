"""Directed-rounding interval arithmetic on MPFR dyadic endpoints.

Endpoints are gmpy2.mpfr values, i.e. exact dyadic rationals; every operation
rounds the lower endpoint down and the upper endpoint up, so an Interval always
encloses the true real value.  Complex values are enclosed by axis-aligned
rectangles (a pair of intervals).
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpfr, mpq

_CTX_CACHE = {}


def _ctx(prec, rnd):
    key = (prec, rnd)
    ctx = _CTX_CACHE.get(key)
    if ctx is None:
        ctx = gmpy2.context(precision=prec, round=rnd)
        _CTX_CACHE[key] = ctx
    return ctx


def ctx_down(prec):
    return _ctx(prec, gmpy2.RoundDown)


def ctx_up(prec):
    return _ctx(prec, gmpy2.RoundUp)


def mpfr_down(value, prec):
    """Largest dyadic with `prec` significand bits that is <= value."""
    return ctx_down(prec).add(mpfr(0, prec), value)


def mpfr_up(value, prec):
    return ctx_up(prec).add(mpfr(0, prec), value)


def mpfr_neg(x):
    # bare -x would round to the ambient (53-bit) context; negation at the
    # operand's own precision is exact
    return _ctx(x.precision, gmpy2.RoundDown).minus(x)


class Interval:
    """Closed real interval [lo, hi] with dyadic endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        if not lo <= hi:
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def from_rational(q, prec):
        q = mpq(q)
        return Interval(mpfr_down(q, prec), mpfr_up(q, prec))

    @staticmethod
    def point(x):
        x = mpfr(x) if not isinstance(x, mpfr) else x
        return Interval(x, x)

    @staticmethod
    def zero():
        return Interval(mpfr(0), mpfr(0))

    # -- queries --------------------------------------------------------------

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    @property
    def prec(self):
        return max(self.lo.precision, self.hi.precision)

    def width(self):
        return ctx_up(self.prec + 8).sub(self.hi, self.lo)

    def mid(self):
        p = self.prec + 8
        half = ctx_down(p).div(ctx_down(p).add(self.lo, self.hi), mpfr(2, p))
        return half

    def contains_zero(self):
        return self.lo <= 0 <= self.hi

    def contains(self, q):
        return self.lo <= q <= self.hi

    def is_positive(self):
        return self.lo > 0

    def is_negative(self):
        return self.hi < 0

    def sign(self):
        """+1 / -1 when certified, None when the interval straddles 0."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == 0 and self.hi == 0:
            return 0
        return None

    def lo_q(self):
        return mpq(self.lo)

    def hi_q(self):
        return mpq(self.hi)

    def overlaps(self, other):
        return self.lo <= other.hi and other.lo <= self.hi

    def contains_interval(self, other):
        return self.lo <= other.lo and other.hi <= self.hi

    # -- arithmetic -----------------------------------------------------------

    def neg(self):
        return Interval(mpfr_neg(self.hi), mpfr_neg(self.lo))

    def add(self, other, prec=None):
        p = prec or max(self.prec, other.prec)
        return Interval(ctx_down(p).add(self.lo, other.lo),
                        ctx_up(p).add(self.hi, other.hi))

    def sub(self, other, prec=None):
        p = prec or max(self.prec, other.prec)
        return Interval(ctx_down(p).sub(self.lo, other.hi),
                        ctx_up(p).sub(self.hi, other.lo))

    def mul(self, other, prec=None):
        p = prec or max(self.prec, other.prec)
        cd, cu = ctx_down(p), ctx_up(p)
        cands_d = [cd.mul(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        cands_u = [cu.mul(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return Interval(min(cands_d), max(cands_u))

    def square(self, prec=None):
        p = prec or self.prec
        cd, cu = ctx_down(p), ctx_up(p)
        if self.lo >= 0:
            return Interval(cd.mul(self.lo, self.lo), cu.mul(self.hi, self.hi))
        if self.hi <= 0:
            return Interval(cd.mul(self.hi, self.hi), cu.mul(self.lo, self.lo))
        m = max(-self.lo, self.hi)
        return Interval(mpfr(0), cu.mul(m, m))

    def scale(self, q, prec=None):
        """Multiply by an exact rational."""
        q = mpq(q)
        p = prec or self.prec
        cd, cu = ctx_down(p), ctx_up(p)
        if q >= 0:
            return Interval(cd.mul(self.lo, q), cu.mul(self.hi, q))
        return Interval(cd.mul(self.hi, q), cu.mul(self.lo, q))

    def div_int(self, n, prec=None):
        return self.scale(mpq(1, n), prec)

    def div(self, other, prec=None):
        """Division by an interval not containing zero."""
        if other.contains_zero():
            raise ZeroDivisionError("interval divisor contains zero")
        p = prec or max(self.prec, other.prec)
        cd, cu = ctx_down(p), ctx_up(p)
        cands_d = [cd.div(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        cands_u = [cu.div(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return Interval(min(cands_d), max(cands_u))

    def abs(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return self.neg()
        return Interval(mpfr(0), max(mpfr_neg(self.lo), self.hi))

    def mignitude(self):
        """Distance of the interval from zero (0 when it contains zero)."""
        if self.contains_zero():
            return mpfr(0)
        if self.lo > 0:
            return self.lo
        return mpfr_neg(self.hi)

    def log(self, prec=None):
        """Natural log of a strictly positive interval."""
        if self.lo <= 0:
            raise ValueError("log: interval not strictly positive")
        p = prec or self.prec
        return Interval(ctx_down(p).log(self.lo), ctx_up(p).log(self.hi))

    def sqrt(self, prec=None):
        if self.lo < 0:
            raise ValueError("sqrt: interval not nonnegative")
        p = prec or self.prec
        return Interval(ctx_down(p).sqrt(self.lo), ctx_up(p).sqrt(self.hi))

    def max_with_zero(self):
        """Interval image of x -> max(0, x); used by log-plus."""
        return Interval(max(self.lo, mpfr(0)), max(self.hi, mpfr(0)))


def iv_sum(intervals, prec):
    lo = mpfr(0, prec)
    hi = mpfr(0, prec)
    cd, cu = ctx_down(prec), ctx_up(prec)
    for iv in intervals:
        lo = cd.add(lo, iv.lo)
        hi = cu.add(hi, iv.hi)
    return Interval(lo, hi)


def iv_dot(row, vec, prec):
    """Dot product of a list of Intervals with a list of exact integers/rationals."""
    terms = [c.scale(x, prec) for c, x in zip(row, vec) if x != 0]
    if not terms:
        return Interval.zero()
    return iv_sum(terms, prec)


class ComplexEnclosure:
    """Axis-aligned rectangle enclosing a complex value."""

    __slots__ = ("real_part", "imag_part", "precision_bits")

    def __init__(self, real_part, imag_part, precision_bits=None):
        self.real_part = real_part
        self.imag_part = imag_part
        self.precision_bits = precision_bits or max(real_part.prec, imag_part.prec)

    def __repr__(self):
        return f"ComplexEnclosure({self.real_part!r}, {self.imag_part!r})"

    @staticmethod
    def from_real(iv):
        return ComplexEnclosure(iv, Interval.zero(), iv.prec)

    def add(self, other, prec=None):
        return ComplexEnclosure(self.real_part.add(other.real_part, prec),
                                self.imag_part.add(other.imag_part, prec))

    def sub(self, other, prec=None):
        return ComplexEnclosure(self.real_part.sub(other.real_part, prec),
                                self.imag_part.sub(other.imag_part, prec))

    def mul(self, other, prec=None):
        p = prec or max(self.precision_bits, other.precision_bits)
        re = self.real_part.mul(other.real_part, p).sub(
            self.imag_part.mul(other.imag_part, p), p)
        im = self.real_part.mul(other.imag_part, p).add(
            self.imag_part.mul(other.real_part, p), p)
        return ComplexEnclosure(re, im)

    def scale(self, q, prec=None):
        return ComplexEnclosure(self.real_part.scale(q, prec),
                                self.imag_part.scale(q, prec))

    def abs_squared(self, prec=None):
        p = prec or self.precision_bits
        return self.real_part.square(p).add(self.imag_part.square(p), p)

    def modulus(self, prec=None):
        return self.abs_squared(prec).sqrt(prec)

    def width(self):
        return max(self.real_part.width(), self.imag_part.width())

    def overlaps(self, other):
        return (self.real_part.overlaps(other.real_part)
                and self.imag_part.overlaps(other.imag_part))

    def is_real_possible(self):
        return self.imag_part.contains_zero()


def interval_matrix_inverse(rows, prec):
    """Interval inverse of a square interval matrix by Gauss-Jordan with
    mignitude pivoting; None when a pivot cannot be bounded away from zero."""
    n = len(rows)
    aug = [[rows[i][j] for j in range(n)]
           + [Interval.from_rational(1 if j == i else 0, prec) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv, best = None, None
        for r in range(col, n):
            mig = aug[r][col].mignitude()
            if mig > 0 and (best is None or mig > best):
                piv, best = r, mig
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pivot = aug[col][col]
        aug[col] = [e.div(pivot, prec) for e in aug[col]]
        for r in range(n):
            if r == col:
                continue
            f = aug[r][col]
            if f.lo == 0 and f.hi == 0:
                continue
            aug[r] = [er.sub(f.mul(ec, prec), prec) for er, ec in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def eval_poly_interval(coeffs_q, z: ComplexEnclosure, prec):
    """Horner evaluation of a rational-coefficient polynomial (ascending) on a
    complex rectangle."""
    acc = ComplexEnclosure(Interval.zero(), Interval.zero(), prec)
    for c in reversed(coeffs_q):
        acc = acc.mul(z, prec)
        if c != 0:
            acc = ComplexEnclosure(acc.real_part.add(Interval.from_rational(c, prec), prec),
                                   acc.imag_part)
    return acc


def eval_poly_interval_real(coeffs_q, x: Interval, prec):
    acc = Interval.zero()
    for c in reversed(coeffs_q):
        acc = acc.mul(x, prec)
        if c != 0:
            acc = acc.add(Interval.from_rational(c, prec), prec)
    return acc
