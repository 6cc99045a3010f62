"""Exact arithmetic in K = Q[x]/(f), certified root isolation and adaptive
complex embeddings.

Elements are rational coefficient vectors in the power basis of the defining
polynomial.  Embeddings are indexed 1..r1+r2 over the canonically ordered root
list (real roots ascending, then one representative per conjugate pair with
positive imaginary part, ordered by (real part, imaginary part)).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import gmpy2
import mpmath
from gmpy2 import mpq, mpfr

from .errors import (InternalError, NotSquarefree, PrecisionExceeded,
                     ZeroElement)
from .intervals import (ComplexEnclosure, Interval, eval_poly_interval,
                        mpfr_down, mpfr_up)
from .polys import (RationalPoly, is_squarefree, isolate_real_roots_exact,
                    lagrange_interpolate, poly_gcd, poly_xgcd,
                    refine_sign_change, resultant, squarefree_part,
                    sturm_chain, halve_palindromic)

DEFAULT_PRECISION = 128
DEFAULT_CEILING = 8192
# Strict-sign refinements may continue past the ceiling (equality has been
# excluded exactly by then), but not without bound.
HARD_LADDER_FACTOR = 64
_GUARD = 10_000


@dataclass(frozen=True)
class Precision:
    bits: int = DEFAULT_PRECISION
    ceiling: int = DEFAULT_CEILING

    def ladder(self):
        p = self.bits
        while True:
            yield p
            if p >= self.ceiling:
                return
            p = min(2 * p, self.ceiling)

    def extended_ladder(self):
        yield from self.ladder()
        p = self.ceiling
        while p < self.ceiling * HARD_LADDER_FACTOR:
            p *= 2
            yield p


def _mpf_to_mpq(x):
    """Exact rational value of an mpmath float."""
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if man == 0:
        return mpq(0)
    v = mpq(man) * (mpq(2) ** exp if exp >= 0 else mpq(1, 2 ** -exp))
    return -v if sign else v


def _bits_of(q):
    """Roughly -log2 of a positive rational, >= the true value - 1."""
    q = mpq(q)
    if q <= 0:
        raise ValueError
    return q.denominator.bit_length() - q.numerator.bit_length()


# ---------------------------------------------------------------------------
# field elements


class FieldElement:
    """Vector of n rationals in the power basis of the defining root."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(mpq(c) for c in coeffs)

    def __repr__(self):
        return f"FieldElement({[str(c) for c in self.coeffs]})"

    def __eq__(self, other):
        return isinstance(other, FieldElement) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def is_rational(self):
        return all(c == 0 for c in self.coeffs[1:])

    def as_poly(self):
        return RationalPoly(self.coeffs)

    @staticmethod
    def rational(q, n):
        return FieldElement([mpq(q)] + [mpq(0)] * (n - 1))

    @staticmethod
    def from_coeffs(seq, n):
        cs = [mpq(c) for c in seq]
        if len(cs) > n:
            raise ValueError(f"coefficient vector longer than degree {n}")
        cs += [mpq(0)] * (n - len(cs))
        return FieldElement(cs)


def _solve_linear(rows, rhs):
    """Solve an exactly-determined/overdetermined rational system; returns the
    solution vector or None when inconsistent.  rows: m lists of length k."""
    m = len(rows)
    k = len(rows[0]) if m else 0
    M = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    piv_cols = []
    rank = 0
    for col in range(k):
        piv = next((r for r in range(rank, m) if M[r][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        pv = M[rank][col]
        M[rank] = [e / pv for e in M[rank]]
        for r in range(m):
            if r != rank and M[r][col] != 0:
                fac = M[r][col]
                M[r] = [e - fac * p for e, p in zip(M[r], M[rank])]
        piv_cols.append(col)
        rank += 1
    if any(M[r][k] != 0 for r in range(rank, m)):
        return None
    sol = [mpq(0)] * k
    for ri, col in enumerate(piv_cols):
        sol[col] = M[ri][k]
    return sol


# ---------------------------------------------------------------------------
# certified root isolation


class _RealRootBox:
    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        self.lo = mpq(lo)
        self.hi = mpq(hi)

    def width(self):
        return self.hi - self.lo


class _ComplexRootBox:
    """Disc |z - (re + i*im)| <= rad, strictly inside the upper half plane."""

    __slots__ = ("re", "im", "rad")

    def __init__(self, re, im, rad):
        self.re = mpq(re)
        self.im = mpq(im)
        self.rad = mpq(rad)


class IsolatedRoots:
    """All roots of a squarefree rational polynomial, canonically ordered,
    with certified refinable enclosures.

    Stored roots: the real ones ascending, then one representative per
    conjugate pair (positive imaginary part), ordered by (real, imaginary).
    Refinement is a pure upgrade (new enclosures nested in old) and is
    serialised by an internal lock.
    """

    def __init__(self, poly: RationalPoly):
        poly = poly.monic()
        if poly.degree < 1:
            raise ValueError("need degree >= 1")
        if not is_squarefree(poly):
            raise NotSquarefree(f"polynomial {poly!r} is not squarefree")
        self.poly = poly
        self.der = poly.derivative()
        self.chain = sturm_chain(poly)
        self.lock = threading.RLock()
        self._on_circle = None
        self._sum_pair = None
        self.reals = [_RealRootBox(a, b) for a, b in isolate_real_roots_exact(poly, self.chain)]
        self.r1 = len(self.reals)
        self.r2 = (poly.degree - self.r1) // 2
        self.cplx = self._isolate_complex() if self.r2 else []
        self._order_complex()

    # -- initial complex isolation --------------------------------------------

    def _certified_disc(self, re, im, prec):
        """Certified radius around a candidate point: every point has a root of
        poly within degree * |f(z)/f'(z)|."""
        z = ComplexEnclosure(Interval.from_rational(re, prec),
                             Interval.from_rational(im, prec), prec)
        fv = eval_poly_interval(self.poly.coeffs, z, prec).modulus(prec)
        dv = eval_poly_interval(self.der.coeffs, z, prec).modulus(prec)
        if not dv.lo > 0:
            return None
        r = gmpy2.context(precision=prec, round=gmpy2.RoundUp).div(
            gmpy2.context(precision=prec, round=gmpy2.RoundUp).mul(
                mpfr(self.poly.degree, prec), fv.hi), dv.lo)
        return mpq(r)

    def _isolate_complex(self):
        n = self.poly.degree
        dps = max(40, 6 * n)
        coeffs_desc = list(reversed(self.poly.coeffs))
        for _ in range(14):
            try:
                with mpmath.workdps(dps):
                    cs = [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
                          for c in coeffs_desc]
                    rts = mpmath.polyroots(cs, maxsteps=200, extraprec=dps * 2)
            except mpmath.libmp.NoConvergence:
                dps *= 2
                continue
            upper = [r for r in rts if r.imag > 0]
            if len(upper) != self.r2:
                dps *= 2
                continue
            prec = int(dps * 3.4) + 64
            boxes = []
            for r in upper:
                re, im = _mpf_to_mpq(r.real), _mpf_to_mpq(r.imag)
                rad = self._certified_disc(re, im, prec)
                if rad is None:
                    boxes = None
                    break
                boxes.append(_ComplexRootBox(re, im, rad))
            if boxes is None:
                dps *= 2
                continue
            if self._discs_ok(boxes):
                return boxes
            dps *= 2
        raise InternalError("complex root isolation did not converge")

    @staticmethod
    def _discs_ok(boxes):
        for b in boxes:
            if not b.im - b.rad > 0:
                return False
        for i, a in enumerate(boxes):
            for b in boxes[i + 1:]:
                d2 = (a.re - b.re) ** 2 + (a.im - b.im) ** 2
                if not d2 > (a.rad + b.rad) ** 2:
                    return False
        return True

    # -- canonical ordering -----------------------------------------------------

    def _sum_pair_poly(self):
        """Squarefree polynomial whose real roots include every real half-sum
        (a_i + a_j)/2 of roots, hence every real part of a root."""
        if self._sum_pair is None:
            f = self.poly
            d = f.degree
            pts = []
            for t in range(d * d + 1):
                y = mpq(t)
                g = f.compose_linear(mpq(-1), 2 * y)  # f(2y - x) in x
                pts.append((y, resultant(f, g)))
            rp = lagrange_interpolate(pts)
            rp = squarefree_part(rp)
            self._sum_pair = (rp, isolate_real_roots_exact(rp))
        return self._sum_pair

    def _match_real_value(self, lo, hi, refine_self, rp, rp_boxes):
        """Index of the rp root that the (refinable) value [lo(), hi()] equals."""
        boxes = [list(b) for b in rp_boxes]
        for _ in range(_GUARD):
            a, b = lo(), hi()
            hits = [i for i, (u, v) in enumerate(boxes) if not (v < a or b < u)]
            if len(hits) == 1:
                u, v = boxes[hits[0]]
                if u <= a and b <= v:
                    return hits[0]
            for i in hits:
                u, v = boxes[i]
                if v > u:
                    boxes[i] = list(refine_sign_change(rp, u, v, (v - u) / 4))
            refine_self()
        raise InternalError("real-part matching did not converge")

    def _compare_complex(self, b1, b2):
        """Certified lexicographic (re, im) comparison of two upper-half discs."""
        if b1 is b2:
            return 0
        for attempt in range(10):
            if b1.re + b1.rad < b2.re - b2.rad:
                return -1
            if b2.re + b2.rad < b1.re - b1.rad:
                return 1
            bits = max(_bits_of_width(b1.rad), _bits_of_width(b2.rad), 32) + 16 * (attempt + 1)
            self._refine_complex(b1, bits)
            self._refine_complex(b2, bits)
        # real parts not separable numerically: decide equality exactly via the
        # polynomial carrying every real half-sum of roots
        rp, rp_boxes = self._sum_pair_poly()
        i1 = self._match_real_value(lambda: b1.re - b1.rad, lambda: b1.re + b1.rad,
                                    lambda: self._refine_complex(b1, _bits_of_width(b1.rad) + 16),
                                    rp, rp_boxes)
        i2 = self._match_real_value(lambda: b2.re - b2.rad, lambda: b2.re + b2.rad,
                                    lambda: self._refine_complex(b2, _bits_of_width(b2.rad) + 16),
                                    rp, rp_boxes)
        if i1 != i2:
            u1, u2 = rp_boxes[i1], rp_boxes[i2]
            while not (u1[1] < u2[0] or u2[1] < u1[0]):
                u1 = refine_sign_change(rp, u1[0], u1[1], max((u1[1] - u1[0]) / 4, mpq(0)))
                u2 = refine_sign_change(rp, u2[0], u2[1], max((u2[1] - u2[0]) / 4, mpq(0)))
            return -1 if u1[1] < u2[0] else 1
        # equal real parts: imaginary parts of distinct upper roots must differ
        for _ in range(_GUARD):
            if b1.im + b1.rad < b2.im - b2.rad:
                return -1
            if b2.im + b2.rad < b1.im - b1.rad:
                return 1
            bits = max(_bits_of_width(b1.rad), _bits_of_width(b2.rad), 32) + 16
            self._refine_complex(b1, bits)
            self._refine_complex(b2, bits)
        raise InternalError("complex ordering did not converge")

    def _order_complex(self):
        import functools
        self.cplx.sort(key=lambda b: (b.re, b.im))
        if len(self.cplx) > 1:
            self.cplx.sort(key=functools.cmp_to_key(self._compare_complex))

    # -- refinement ---------------------------------------------------------------

    def _refine_real(self, box, bits):
        with self.lock:
            target = mpq(1, 2) ** bits
            if box.width() <= target:
                return
            box.lo, box.hi = refine_sign_change(self.poly, box.lo, box.hi, target)

    def _refine_complex(self, box, bits):
        with self.lock:
            target = mpq(1, 2) ** bits
            if box.rad <= target:
                return
            prec = max(64, 2 * max(bits, _bits_of_width(box.rad)) + 64)
            for _ in range(_GUARD):
                ctx = gmpy2.context(precision=prec)
                coeffs = [ctx.div(mpfr(c.numerator, prec), mpfr(c.denominator, prec))
                          for c in self.poly.coeffs]
                z = gmpy2.mpc(ctx.div(mpfr(box.re.numerator, prec), mpfr(box.re.denominator, prec)),
                              ctx.div(mpfr(box.im.numerator, prec), mpfr(box.im.denominator, prec)),
                              precision=(prec, prec))
                for _ in range(4):
                    fv = gmpy2.mpc(0, precision=(prec, prec))
                    dv = gmpy2.mpc(0, precision=(prec, prec))
                    for c in reversed(coeffs):
                        dv = ctx.add(ctx.mul(dv, z), fv)
                        fv = ctx.add(ctx.mul(fv, z), c)
                    if dv == 0:
                        break
                    z = ctx.sub(z, ctx.div(fv, dv))
                re, im = mpq(z.real), mpq(z.imag)
                rad = self._certified_disc(re, im, prec)
                if rad is not None:
                    d2 = (re - box.re) ** 2 + (im - box.im) ** 2
                    slack = box.rad - rad
                    if slack > 0 and d2 <= slack * slack:
                        box.re, box.im, box.rad = re, im, rad
                        if box.rad <= target:
                            return
                prec *= 2
                if prec > (bits + 64) * HARD_LADDER_FACTOR + 2 ** 20:
                    raise InternalError("complex refinement stalled")

    # -- enclosures ------------------------------------------------------------------

    @property
    def nstored(self):
        return self.r1 + self.r2

    def stored_enclosure(self, i, prec):
        """Rectangle around stored root i, refined to about 2^-prec."""
        if i < self.r1:
            box = self.reals[i]
            self._refine_real(box, prec)
            re = Interval(mpfr_down(box.lo, prec + 16), mpfr_up(box.hi, prec + 16))
            return ComplexEnclosure(re, Interval.zero(), prec)
        box = self.cplx[i - self.r1]
        self._refine_complex(box, prec)
        re = Interval(mpfr_down(box.re - box.rad, prec + 16), mpfr_up(box.re + box.rad, prec + 16))
        im = Interval(mpfr_down(box.im - box.rad, prec + 16), mpfr_up(box.im + box.rad, prec + 16))
        return ComplexEnclosure(re, im, prec)

    def identify(self, provider):
        """Index of the stored root that the refinable enclosure encloses.

        provider(prec) must return a ComplexEnclosure of a value known to be a
        root of the polynomial, with either imaginary part >= 0 or a value
        whose conjugate-normalised representative is wanted.
        """
        prec = 64
        for _ in range(_GUARD):
            e = provider(prec)
            # normalise to the stored (upper half plane) representative
            if e.imag_part.hi < 0:
                e = ComplexEnclosure(e.real_part, e.imag_part.neg(), e.precision_bits)
            elif e.imag_part.contains_zero() and e.imag_part.lo < 0:
                mirrored = e.imag_part.neg()
                top = max(mirrored.hi, e.imag_part.hi)
                e = ComplexEnclosure(e.real_part, Interval(mpfr(0), top),
                                     e.precision_bits)
            hits = [i for i in range(self.nstored)
                    if e.overlaps(self.stored_enclosure(i, prec))]
            if len(hits) == 1:
                return hits[0]
            if not hits:
                raise InternalError("enclosure matches no root")
            prec *= 2
        raise InternalError("root identification did not converge")

    # -- unit circle structure --------------------------------------------------------

    def on_circle_indices(self):
        """Stored-root indices whose root lies exactly on |z| = 1."""
        if self._on_circle is not None:
            return self._on_circle
        out = set()
        with self.lock:
            for pt in (mpq(1), mpq(-1)):
                if self.poly.eval(pt) == 0:
                    for i, box in enumerate(self.reals):
                        if box.lo <= pt <= box.hi:
                            out.add(i)
                            box.lo = box.hi = pt
                            break
        if self.r2:
            p = self.poly
            # remove +-1 roots, then the reciprocal gcd factor carries every
            # conjugate circle pair
            for pt in (mpq(1), mpq(-1)):
                while p.eval(pt) == 0:
                    p = p // RationalPoly([-pt, mpq(1)])
            h = poly_gcd(p, p.reverse())
            if h.degree >= 2:
                q = halve_palindromic(h.monic())
                for (a, b) in isolate_real_roots_exact(q):
                    lo, hi = a, b
                    if not (mpq(-2) < lo and hi < mpq(2)):
                        if lo == hi:  # exact rational root of q
                            if not (mpq(-2) < lo < mpq(2)):
                                continue
                        else:
                            while not (mpq(-2) < lo and hi < mpq(2)):
                                if hi <= mpq(-2) or lo >= mpq(2):
                                    break
                                lo, hi = refine_sign_change(q, lo, hi, (hi - lo) / 4)
                            if hi <= mpq(-2) or lo >= mpq(2):
                                continue
                    out.add(self.r1 + self._match_circle_pair(lo, hi, q))
        self._on_circle = frozenset(out)
        return self._on_circle

    def _match_circle_pair(self, lo, hi, q):
        """Stored complex index of the circle pair with real part y0/2 for the
        q-root y0 isolated in [lo, hi]."""
        prec = 64
        for _ in range(_GUARD):
            re = Interval(mpfr_down(lo / 2, prec), mpfr_up(hi / 2, prec))
            one = Interval.from_rational(1, prec)
            im2 = one.sub(re.square(prec), prec)
            if im2.lo > 0:
                e = ComplexEnclosure(re, im2.sqrt(prec), prec)
                hits = [j for j in range(self.r2)
                        if e.overlaps(self.stored_enclosure(self.r1 + j, prec))]
                if len(hits) == 1:
                    return hits[0]
                if not hits:
                    raise InternalError("circle pair matches no stored root")
            if hi > lo:
                lo, hi = refine_sign_change(q, lo, hi, (hi - lo) / 4)
            prec *= 2
        raise InternalError("circle matching did not converge")

    def modulus_vs_one(self, i):
        """Exact sign of |root_i| - 1."""
        if i in self.on_circle_indices():
            return 0
        if i < self.r1:
            box = self.reals[i]
            for _ in range(_GUARD):
                if box.lo > 1 or box.hi < -1:
                    return 1
                if -1 < box.lo and box.hi < 1:
                    return -1
                self._refine_real(box, _bits_of_width(box.width()) + 8)
            raise PrecisionExceeded("modulus sign of real root unresolved")
        box = self.cplx[i - self.r1]
        for _ in range(_GUARD):
            # rational bracket of |z|^2 over the disc
            c2 = box.re ** 2 + box.im ** 2
            spread = 2 * box.rad * (abs(box.re) + box.im) + box.rad ** 2
            if c2 - spread > 1:
                return 1
            if c2 + spread < 1:
                return -1
            self._refine_complex(box, _bits_of_width(box.rad) + 8)
        raise PrecisionExceeded("modulus sign of complex root unresolved")

    def compare_real_root_to(self, i, q):
        """Exact sign of root_i - q for a rational q."""
        box = self.reals[i]
        q = mpq(q)
        for _ in range(_GUARD):
            if box.lo > q:
                return 1
            if box.hi < q:
                return -1
            if box.lo == box.hi == q:
                return 0
            if self.poly.eval(q) == 0 and box.lo <= q <= box.hi:
                box.lo = box.hi = q
                return 0
            self._refine_real(box, _bits_of_width(box.width()) + 8)
        raise PrecisionExceeded("real root comparison unresolved")


def _bits_of_width(w):
    w = mpq(w)
    if w <= 0:
        return 64
    b = w.denominator.bit_length() - w.numerator.bit_length()
    return max(b, 1)


# ---------------------------------------------------------------------------
# the number field


class NumberField:
    """Q[x]/(f) for a monic squarefree integer polynomial f.

    Irreducibility of f is the caller's responsibility; squarefreeness is
    verified.  Stores r1 + r2 canonically ordered certified root enclosures.
    """

    def __init__(self, defining_poly, precision: Precision = None):
        if isinstance(defining_poly, (list, tuple)):
            defining_poly = RationalPoly(defining_poly)
        if defining_poly.degree < 2:
            raise ValueError("defining polynomial must have degree >= 2")
        if not defining_poly.is_monic() or not defining_poly.is_integer():
            raise ValueError("defining polynomial must be monic with integer coefficients")
        self.defining_poly = defining_poly
        self.n = defining_poly.degree
        self.iso = IsolatedRoots(defining_poly)
        self.r1 = self.iso.r1
        self.r2 = self.iso.r2
        self.precision = precision or Precision()
        self._minpoly_cache = {}
        self._iso_cache = {defining_poly: self.iso}
        self._pair_poly_cache = {}

    def __repr__(self):
        return f"NumberField({self.defining_poly!r}, r1={self.r1}, r2={self.r2})"

    @property
    def unit_rank(self):
        return self.r1 + self.r2 - 1

    @property
    def embedding_count(self):
        return self.r1 + self.r2

    def element(self, coeffs):
        return FieldElement.from_coeffs(coeffs, self.n)

    def one(self):
        return FieldElement.rational(1, self.n)

    def theta(self):
        """The power-basis generator."""
        return FieldElement.from_coeffs([0, 1], self.n)

    def isolated(self, poly):
        iso = self._iso_cache.get(poly)
        if iso is None:
            iso = IsolatedRoots(poly)
            self._iso_cache[poly] = iso
        return iso


def isolate_roots(f, precision_bits):
    """Certified enclosures for all roots of a squarefree rational polynomial.

    Returns (enclosures, (r1, r2)): r1 real enclosures ascending then r2
    upper-half-plane representatives ordered by (real, imaginary), each
    refined to width about 2^-precision_bits.
    """
    if isinstance(f, (list, tuple)):
        f = RationalPoly(f)
    iso = IsolatedRoots(f)
    encl = [iso.stored_enclosure(i, precision_bits) for i in range(iso.nstored)]
    return encl, (iso.r1, iso.r2)


# ---------------------------------------------------------------------------
# element operations


def mul_mod(a: FieldElement, b: FieldElement, field: NumberField) -> FieldElement:
    """Product in K, reduced modulo the defining polynomial."""
    n = field.n
    prod = [mpq(0)] * (2 * n - 1)
    for i, ai in enumerate(a.coeffs):
        if ai == 0:
            continue
        for j, bj in enumerate(b.coeffs):
            if bj != 0:
                prod[i + j] += ai * bj
    f = field.defining_poly.coeffs
    for k in range(2 * n - 2, n - 1, -1):
        c = prod[k]
        if c == 0:
            continue
        prod[k] = mpq(0)
        for j in range(n):  # x^k = -sum f_j x^(k-n+j), f monic
            prod[k - n + j] -= c * f[j]
    return FieldElement(prod[:n])


def inverse(a: FieldElement, field: NumberField) -> FieldElement:
    """Multiplicative inverse via extended polynomial gcd."""
    if a.is_zero():
        raise ZeroElement("inverse of zero")
    g, u, _ = poly_xgcd(a.as_poly(), field.defining_poly)
    if g.degree != 0:
        raise InternalError("non-invertible element: defining polynomial is reducible")
    u = u.scale(1 / g.coeffs[0]) if g.coeffs[0] != 1 else u
    u = u % field.defining_poly
    return FieldElement.from_coeffs(u.coeffs, field.n)


def pow_element(a: FieldElement, e: int, field: NumberField) -> FieldElement:
    """a**e by binary exponentiation; negative e via inverse()."""
    if e < 0:
        return pow_element(inverse(a, field), -e, field)
    result = field.one()
    base = a
    while e:
        if e & 1:
            result = mul_mod(result, base, field)
        base = mul_mod(base, base, field)
        e >>= 1
    return result


def minimal_polynomial(a: FieldElement, field: NumberField) -> RationalPoly:
    """Monic minimal polynomial over Q via the first linear dependency among
    the powers 1, a, a^2, ..."""
    cached = field._minpoly_cache.get(a.coeffs)
    if cached is not None:
        return cached
    n = field.n
    powers = [field.one().coeffs]
    cur = field.one()
    result = None
    for k in range(1, n + 1):
        cur = mul_mod(cur, a, field)
        rows = [[powers[j][i] for j in range(k)] for i in range(n)]
        sol = _solve_linear(rows, list(cur.coeffs))
        if sol is not None:
            result = RationalPoly([-z for z in sol] + [mpq(1)])
            break
        powers.append(cur.coeffs)
    if result is None:
        raise InternalError("no minimal polynomial found")
    field._minpoly_cache[a.coeffs] = result
    return result


def field_norm(a: FieldElement, field: NumberField):
    """N(a): product of all embedded values, computed exactly."""
    m = minimal_polynomial(a, field)
    d = m.degree
    const = m.eval(0) if d == 0 else m[0]
    base = const if d % 2 == 0 else -const
    return base ** (field.n // d)


def embed(a: FieldElement, k: int, field: NumberField, precision_bits=None) -> ComplexEnclosure:
    """Certified enclosure of the k-th embedding of a (k is 1-based over the
    stored embeddings), width below 2^-precision_bits * max(1, magnitude)."""
    if not 1 <= k <= field.embedding_count:
        raise ValueError(f"embedding index {k} out of range")
    p = precision_bits or field.precision.bits
    i = k - 1
    slack = 16
    for _ in range(_GUARD):
        work = p + slack
        root = field.iso.stored_enclosure(i, work)
        val = eval_poly_interval(a.coeffs, root, work)
        mod = val.modulus(work)
        scale = max(mpq(1), mpq(mod.lo))
        if mpq(val.width()) <= mpq(1, 2) ** p * scale:
            return val
        slack = slack * 2 + 8
    raise PrecisionExceeded("embedding did not reach target width")


def _root_index_of_value(a: FieldElement, k: int, field: NumberField):
    """Index (within IsolatedRoots(minpoly(a))) of the root equal to the k-th
    embedding of a."""
    m = minimal_polynomial(a, field)
    iso = field.isolated(m)
    idx = iso.identify(lambda prec: embed(a, k, field, prec))
    return iso, idx


def certify_real_at(a: FieldElement, k: int, field: NumberField) -> bool:
    """Exactly decide whether the k-th (complex) embedding of a is real."""
    if a.is_rational():
        return True
    for prec in field.precision.ladder():
        e = embed(a, k, field, prec)
        if not e.imag_part.contains_zero():
            return False
    iso, idx = _root_index_of_value(a, k, field)
    return idx < iso.r1


def modulus_sign_at(a: FieldElement, k: int, field: NumberField) -> int:
    """Exact sign of log|phi_k(a)|, i.e. of |phi_k(a)| - 1."""
    if a.is_zero():
        raise ZeroElement("modulus of zero")
    for prec in field.precision.ladder():
        m2 = embed(a, k, field, prec).abs_squared()
        if m2.lo > 1:
            return 1
        if m2.hi < 1:
            return -1
    iso, idx = _root_index_of_value(a, k, field)
    return iso.modulus_vs_one(idx)


def value_sign_at(a: FieldElement, k: int, field: NumberField) -> int:
    """Exact sign of the k-th embedding of a, which must be real there."""
    if a.is_zero():
        return 0
    for prec in field.precision.ladder():
        e = embed(a, k, field, prec)
        if e.real_part.lo > 0:
            return 1
        if e.real_part.hi < 0:
            return -1
    iso, idx = _root_index_of_value(a, k, field)
    if idx >= iso.r1:
        raise InternalError("value_sign_at on a non-real value")
    return iso.compare_real_root_to(idx, mpq(0))


def pair_product_poly(field: NumberField, m: RationalPoly) -> RationalPoly:
    """Squarefree polynomial vanishing on every product of two roots of m."""
    cached = field._pair_poly_cache.get(m)
    if cached is not None:
        return cached
    d = m.degree
    pts = []
    for t in range(d * d + 1):
        y = mpq(t)
        # resultant_x(m(x), x^d * m(y/x))
        g = RationalPoly([m[d - j] * y ** (d - j) for j in range(d + 1)])
        pts.append((y, resultant(m, g)))
    p = lagrange_interpolate(pts)
    p = squarefree_part(p)
    field._pair_poly_cache[m] = p
    return p


def pair_product_modulus_sign(a: FieldElement, j: int, k: int, field: NumberField) -> int:
    """Exact sign of log(|phi_j(a)| * |phi_k(a)|)."""
    if a.is_zero():
        raise ZeroElement
    for prec in field.precision.ladder():
        m2 = embed(a, j, field, prec).abs_squared().mul(
            embed(a, k, field, prec).abs_squared())
        if m2.lo > 1:
            return 1
        if m2.hi < 1:
            return -1
    m = minimal_polynomial(a, field)
    pp = pair_product_poly(field, m)
    iso = field.isolated(pp)
    idx = iso.identify(lambda prec: embed(a, j, field, prec).mul(embed(a, k, field, prec)))
    return iso.modulus_vs_one(idx)
