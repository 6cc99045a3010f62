"""Exact univariate polynomial arithmetic over arbitrary-precision rationals.

Coefficients are gmpy2.mpq in ascending degree order with no trailing zeros.
Everything in this module is exact; certified numerics live elsewhere.
"""

from __future__ import annotations

from gmpy2 import mpq

from .errors import ZeroConstantTerm


class RationalPoly:
    """Immutable rational polynomial, coefficients ascending."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [mpq(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- basics ----------------------------------------------------------------

    def __repr__(self):
        return f"RationalPoly({[str(c) for c in self.coeffs]})"

    def __eq__(self, other):
        return isinstance(other, RationalPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else -1

    @property
    def lc(self):
        return self.coeffs[-1]

    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def is_integer(self):
        return all(c.denominator == 1 for c in self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i <= self.degree else mpq(0)

    def monic(self):
        if self.is_zero() or self.is_monic():
            return self
        l = self.lc
        return RationalPoly([c / l for c in self.coeffs])

    # -- ring operations ---------------------------------------------------------

    def __neg__(self):
        return RationalPoly([-c for c in self.coeffs])

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPoly([self[i] + other[i] for i in range(n)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPoly([self[i] - other[i] for i in range(n)])

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return RationalPoly([])
        out = [mpq(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly(out)

    def scale(self, q):
        q = mpq(q)
        return RationalPoly([c * q for c in self.coeffs])

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return RationalPoly([]), self
        quot = [mpq(0)] * (dq + 1)
        ol = other.lc
        for k in range(dq, -1, -1):
            c = rem[k + other.degree] / ol
            quot[k] = c
            if c != 0:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return RationalPoly(quot), RationalPoly(rem[: other.degree])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def derivative(self):
        return RationalPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def eval(self, x):
        """Exact evaluation at a rational point."""
        x = mpq(x)
        acc = mpq(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sign_at(self, x):
        v = self.eval(x)
        return 0 if v == 0 else (1 if v > 0 else -1)

    def reverse(self):
        """x^deg * p(1/x)."""
        return RationalPoly(list(reversed(self.coeffs)))

    def compose_linear(self, a, b):
        """p(a*x + b) by Horner over polynomials."""
        ax = RationalPoly([mpq(b), mpq(a)])
        acc = RationalPoly([])
        for c in reversed(self.coeffs):
            acc = acc * ax + RationalPoly([c])
        return acc


def poly_gcd(f, g):
    """Monic gcd over Q."""
    a, b = f, g
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def poly_xgcd(f, g):
    """(d, u, v) with u*f + v*g = d, d the monic gcd."""
    r0, r1 = f, g
    s0, s1 = RationalPoly([mpq(1)]), RationalPoly([])
    t0, t1 = RationalPoly([]), RationalPoly([mpq(1)])
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    l = r0.lc
    inv = 1 / l
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


def is_squarefree(f):
    if f.degree <= 0:
        return True
    return poly_gcd(f, f.derivative()).degree == 0


def squarefree_part(f):
    g = poly_gcd(f, f.derivative())
    if g.degree == 0:
        return f.monic()
    return (f // g).monic()


def yun_decomposition(f):
    """[(g_i, i)] with f = lc * prod g_i^i, g_i squarefree pairwise coprime."""
    f = f.monic()
    if f.degree <= 0:
        return []
    df = f.derivative()
    a0 = poly_gcd(f, df)
    if a0.degree == 0:
        return [(f, 1)]
    b = f // a0
    c = df // a0
    d = c - b.derivative()
    out = []
    i = 1
    while b.degree > 0:
        ai = poly_gcd(b, d)
        if ai.degree > 0:
            out.append((ai.monic(), i))
        b = b // ai
        c = d // ai
        d = c - b.derivative()
        i += 1
    return out


def resultant(f, g):
    """Exact resultant over Q via the Euclidean recurrence."""
    if f.is_zero() or g.is_zero():
        return mpq(0)
    if f.degree == 0:
        return f.coeffs[0] ** g.degree
    if g.degree == 0:
        return g.coeffs[0] ** f.degree
    r = f % g
    if r.is_zero():
        return mpq(0)
    sign = -1 if (f.degree % 2 == 1 and g.degree % 2 == 1) else 1
    return sign * g.lc ** (f.degree - r.degree) * resultant(g, r)


def lagrange_interpolate(points):
    """Exact polynomial through (x_i, y_i) pairs with distinct rational x_i."""
    acc = RationalPoly([])
    for i, (xi, yi) in enumerate(points):
        if yi == 0:
            continue
        num = RationalPoly([mpq(yi)])
        den = mpq(1)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            num = num * RationalPoly([-mpq(xj), mpq(1)])
            den *= mpq(xi) - mpq(xj)
        acc = acc + num.scale(1 / den)
    return acc


# -- Sturm machinery --------------------------------------------------------------


def sturm_chain(f):
    f = f.monic()
    chain = [f, f.derivative()]
    while chain[-1].degree > 0:
        r = chain[-2] % chain[-1]
        if r.is_zero():
            break
        chain.append(-r)
    if chain[-1].is_zero():
        chain.pop()
    return chain


def _variations(signs):
    v = 0
    prev = 0
    for s in signs:
        if s == 0:
            continue
        if prev != 0 and s != prev:
            v += 1
        prev = s
    return v


def _variations_at(chain, x):
    return _variations([p.sign_at(x) for p in chain])


def _variations_at_inf(chain, positive):
    signs = []
    for p in chain:
        s = 1 if p.lc > 0 else -1
        if not positive and p.degree % 2 == 1:
            s = -s
        signs.append(s)
    return _variations(signs)


def count_real_roots(f, a=None, b=None, chain=None):
    """Number of distinct real roots of squarefree f in the half-open (a, b]
    (whole line when both endpoints omitted)."""
    if f.degree <= 0:
        return 0
    if chain is None:
        chain = sturm_chain(f)
    va = _variations_at(chain, a) if a is not None else _variations_at_inf(chain, False)
    vb = _variations_at(chain, b) if b is not None else _variations_at_inf(chain, True)
    return va - vb


def root_bound(f):
    """Cauchy bound, rounded up to a power of two."""
    if f.degree <= 0:
        return mpq(1)
    m = max(abs(c / f.lc) for c in f.coeffs[:-1])
    b = mpq(1) + m
    p = mpq(1)
    while p < b:
        p *= 2
    return p


def isolate_real_roots_exact(f, chain=None):
    """Disjoint isolating data for all real roots of squarefree f, ascending.

    Returns a list of (lo, hi) rational pairs: either lo == hi (exact rational
    root) or f(lo)*f(hi) < 0 with exactly one root in (lo, hi).
    """
    if f.degree <= 0:
        return []
    if chain is None:
        chain = sturm_chain(f)
    M = root_bound(f)
    out = []

    def recurse(a, b, count):
        if count == 0:
            return
        if count == 1:
            out.append((a, b))
            return
        mid = (a + b) / 2
        left = count_real_roots(f, a, mid, chain)
        recurse(a, mid, left)
        recurse(mid, b, count - left)

    total = count_real_roots(f, -M, M, chain)
    recurse(-M, M, total)

    norm = []
    for a, b in sorted(out):
        # (a, b] holds one root; normalise to exact point or sign-change interval
        if f.eval(b) == 0:
            norm.append((b, b))
            continue
        while f.eval(a) == 0 or f.sign_at(a) == f.sign_at(b):
            # endpoint collision with a neighbouring root: shrink from the left
            a = (a + b) / 2
            if f.eval(a) == 0:
                norm.append((a, a))
                a = None
                break
        if a is not None:
            norm.append((a, b))
    return norm


def _dyadic_bits_for(width):
    """k with 2^-k <= width, for a positive rational width."""
    w = mpq(width)
    k = w.denominator.bit_length() - w.numerator.bit_length() + 1
    return max(k, 1)


def refine_sign_change(f, lo, hi, max_width):
    """Shrink a sign-change interval until hi - lo <= max_width, exactly.

    Newton candidates are snapped to a dyadic grid sized for quadratic
    convergence (keeping endpoint denominators bounded) and verified by exact
    sign evaluation; bisection is the fallback, so progress is certified.
    """
    if lo == hi:
        return lo, hi
    max_width = mpq(max_width)
    df = f.derivative()
    s_hi = f.sign_at(hi)
    while hi - lo > max_width:
        width = hi - lo
        target = width * width
        if target < max_width / 8:
            target = max_width / 8
        if target > width / 4:
            target = width / 4
        kbits = _dyadic_bits_for(target) + 2
        mid = (lo + hi) / 2
        fm = f.eval(mid)
        if fm == 0:
            return mid, mid
        stepped = False
        dm = df.eval(mid)
        if dm != 0:
            z = mid - fm / dm
            step = mpq(1, 1 << kbits)
            grid = (z.numerator << kbits) // z.denominator
            a = mpq(grid - 1, 1 << kbits)
            b = a + 3 * step
            if lo < a and b < hi:
                sa = f.sign_at(a)
                if sa == 0:
                    return a, a
                sb = f.sign_at(b)
                if sb == 0:
                    return b, b
                if sa != sb:
                    lo, hi, s_hi = a, b, sb
                    stepped = True
        if not stepped:
            sm = 1 if fm > 0 else -1
            if sm == s_hi:
                hi = mid
            else:
                lo = mid
    return lo, hi


# -- reciprocal / unit-circle structure ----------------------------------------


def is_reciprocal(p):
    """Self-reciprocal up to sign: reverse(p) == +-p."""
    rev = p.reverse()
    return rev == p or rev == -p


def is_palindromic(p):
    return p.reverse() == p


def halve_palindromic(h):
    """For palindromic h of even degree 2m, the q with h(x) = x^m q(x + 1/x)."""
    m = h.degree // 2
    if h.degree != 2 * m or not is_palindromic(h):
        raise ValueError("not palindromic of even degree")
    # p_j(x + 1/x) = x^j + x^-j
    pj_prev = RationalPoly([mpq(2)])
    pj = RationalPoly([mpq(0), mpq(1)])
    q = RationalPoly([h[m]])
    y = RationalPoly([mpq(0), mpq(1)])
    for j in range(1, m + 1):
        q = q + pj.scale(h[m + j])
        pj_prev, pj = pj, y * pj - pj_prev
    return q


def _root_multiplicity_at(p, x):
    k = 0
    while p.eval(x) == 0:
        p = p // RationalPoly([-mpq(x), mpq(1)])
        k += 1
    return k, p


def count_unit_circle_roots(p):
    """Exact number of roots of p on |z| = 1, with multiplicity.

    p must be monic with integer coefficients and nonzero constant term.  The
    count reduces to counting real roots of the x + 1/x transform of the
    palindromic gcd factor in the open interval (-2, 2), plus direct checks at
    x = +-1.
    """
    if not p.is_monic() or not p.is_integer():
        raise ValueError("need a monic integer polynomial")
    if p.degree >= 0 and p[0] == 0:
        raise ZeroConstantTerm("p(0) = 0")
    total = 0
    for factor, mult in yun_decomposition(p):
        total += mult * _count_circle_squarefree(factor)
    return total


def _count_circle_squarefree(p):
    count = 0
    k1, p = _root_multiplicity_at(p, 1)
    km1, p = _root_multiplicity_at(p, -1)
    count += k1 + km1  # squarefree factor: k's are 0 or 1
    if p.degree <= 0:
        return count
    h = poly_gcd(p, p.reverse())
    if h.degree <= 0:
        return count
    # after stripping +-1 roots, h is palindromic of even degree
    q = halve_palindromic(h.monic())
    chain = sturm_chain(q)
    inner = count_real_roots(q, mpq(-2), mpq(2), chain)
    if q.eval(2) == 0:
        inner -= 1
    return count + 2 * inner
