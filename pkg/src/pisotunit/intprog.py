"""Exact integer linear programming over constraint data known as certified
intervals.

The contract: minimise c.x over integer x with B.x <= b componentwise, and
return every integer point whose objective is within a factor (1+eps) of the
optimum, in ascending objective order.  Every comparison is certified: interval
arithmetic with precision escalation first, exact decision callbacks for
genuine ties.  Termination relies on an objective cap or a feasible warm start
(the search region is then a compact box).
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field as dfield

import gmpy2
from gmpy2 import mpq

from .errors import (Infeasible, NoFallbackProvided, SingularSystem,
                     UnboundedRegion)
from .fields import Precision
from .intervals import Interval, interval_matrix_inverse, iv_dot, iv_sum


@dataclass
class IPProblem:
    """Constraint data: B is an m x nvars interval matrix provided by
    matrix_at(prec) together with the objective row c; b holds exact dyadic
    bounds.  Exact callbacks settle comparisons that intervals cannot."""

    nvars: int
    b: tuple
    eps: object = None
    warm_start: tuple = None
    objective_cap: object = None
    matrix_at: callable = None            # prec -> (rows, c) of Intervals
    exact_row_sign: callable = None       # (i, x) -> sign of B_i.x - b_i, or None
    exact_obj_cmp: callable = None        # (x1, x2) -> sign of c.(x1-x2), or None
    exact_obj_threshold: callable = None  # (x, x0) -> sign of c.x-(1+eps)c.x0, or None
    precision: Precision = dfield(default_factory=Precision)

    def __post_init__(self):
        self.b = tuple(mpq(v) for v in self.b)
        self.eps = mpq(self.eps) if self.eps is not None else mpq(0)
        if self.eps < 0:
            raise ValueError("eps must be nonnegative")
        if self.warm_start is not None:
            self.warm_start = tuple(int(v) for v in self.warm_start)
        if self.objective_cap is not None:
            self.objective_cap = mpq(self.objective_cap)

    @staticmethod
    def from_rational(B, b, c, eps=0, warm_start=None, objective_cap=None,
                      precision=None):
        """Problem over exact rational data; all exact callbacks derived."""
        Bq = [[mpq(e) for e in row] for row in B]
        cq = [mpq(e) for e in c]
        bq = tuple(mpq(e) for e in b)
        epsq = mpq(eps)

        def matrix_at(prec):
            rows = [[Interval.from_rational(e, prec) for e in row] for row in Bq]
            cw = [Interval.from_rational(e, prec) for e in cq]
            return rows, cw

        def row_sign(i, x):
            v = sum(Bq[i][j] * x[j] for j in range(len(x))) - bq[i]
            return 0 if v == 0 else (1 if v > 0 else -1)

        def obj_cmp(x1, x2):
            v = sum(cq[j] * (x1[j] - x2[j]) for j in range(len(x1)))
            return 0 if v == 0 else (1 if v > 0 else -1)

        def obj_threshold(x, x0):
            v = (sum(cq[j] * x[j] for j in range(len(x)))
                 - (1 + epsq) * sum(cq[j] * x0[j] for j in range(len(x0))))
            return 0 if v == 0 else (1 if v > 0 else -1)

        return IPProblem(nvars=len(cq), b=bq, eps=epsq, warm_start=warm_start,
                         objective_cap=objective_cap, matrix_at=matrix_at,
                         exact_row_sign=row_sign, exact_obj_cmp=obj_cmp,
                         exact_obj_threshold=obj_threshold,
                         precision=precision or Precision())


@dataclass(frozen=True)
class IPResult:
    solutions: tuple          # integer vectors, ascending certified objective
    objective_values: tuple   # matching Interval list


class _Matrices:
    def __init__(self, problem):
        self.problem = problem
        self._cache = {}

    def at(self, prec):
        got = self._cache.get(prec)
        if got is None:
            got = self.problem.matrix_at(prec)
            self._cache[prec] = got
        return got


# ---------------------------------------------------------------------------
# certified comparisons


def certified_le(x, y, exact_fallback=None, precision=None):
    """Certified decision of (value enclosed by x) <= y for dyadic/rational y.

    x is an Interval or a callable prec -> Interval (refinable).  When the
    interval straddles y up to the precision ceiling the exact_fallback
    decision callback is invoked; with none available NoFallbackProvided is
    raised rather than guessing.
    """
    y = mpq(y)
    prec_policy = precision or Precision()
    refinable = callable(x)
    for prec in prec_policy.ladder():
        iv = x(prec) if refinable else x
        if iv.hi <= y:
            return True
        if iv.lo > y:
            return False
        if not refinable:
            break
    if exact_fallback is not None:
        s = exact_fallback()
        if s is not None:
            return s <= 0
    if refinable:
        for prec in prec_policy.extended_ladder():
            iv = x(prec)
            if iv.hi <= y:
                return True
            if iv.lo > y:
                return False
    raise NoFallbackProvided(f"interval straddles {y} and no exact decision is available")


def _row_feasible(problem, mats, i, x):
    """Certified decision of B_i . x <= b_i."""
    bi = problem.b[i]
    for prec in problem.precision.ladder():
        rows, _ = mats.at(prec)
        val = iv_dot(rows[i], x, prec)
        if val.hi <= bi:
            return True
        if val.lo > bi:
            return False
    if problem.exact_row_sign is not None:
        s = problem.exact_row_sign(i, x)
        if s is not None:
            return s <= 0
    for prec in problem.precision.extended_ladder():
        rows, _ = mats.at(prec)
        val = iv_dot(rows[i], x, prec)
        if val.hi <= bi:
            return True
        if val.lo > bi:
            return False
    raise NoFallbackProvided(f"row {i} undecided at {x}")


def _point_feasible(problem, mats, x):
    return all(_row_feasible(problem, mats, i, x) for i in range(len(problem.b)))


def _obj_cmp(problem, mats, x1, x2):
    """Certified sign of c.(x1 - x2)."""
    if x1 == x2:
        return 0
    d = tuple(a - b for a, b in zip(x1, x2))
    for prec in problem.precision.ladder():
        _, c = mats.at(prec)
        val = iv_dot(c, d, prec)
        s = val.sign()
        if s is not None:
            return s
    if problem.exact_obj_cmp is not None:
        s = problem.exact_obj_cmp(x1, x2)
        if s is not None:
            return s
    for prec in problem.precision.extended_ladder():
        _, c = mats.at(prec)
        val = iv_dot(c, d, prec)
        s = val.sign()
        if s is not None:
            return s
    raise NoFallbackProvided(f"objective comparison undecided: {x1} vs {x2}")


def _obj_within_threshold(problem, mats, x, x0):
    """Certified decision of c.x <= (1+eps) * c.x0."""
    if x == x0:
        return True
    d = tuple(a - b for a, b in zip(x, x0))
    for prec in problem.precision.ladder():
        _, c = mats.at(prec)
        val = iv_dot(c, d, prec).sub(iv_dot(c, x0, prec).scale(problem.eps), prec)
        if val.hi <= 0:
            return True
        if val.lo > 0:
            return False
    if problem.exact_obj_threshold is not None:
        s = problem.exact_obj_threshold(x, x0)
        if s is not None:
            return s <= 0
    for prec in problem.precision.extended_ladder():
        _, c = mats.at(prec)
        val = iv_dot(c, d, prec).sub(iv_dot(c, x0, prec).scale(problem.eps), prec)
        if val.hi <= 0:
            return True
        if val.lo > 0:
            return False
    raise NoFallbackProvided(f"threshold comparison undecided at {x}")


# ---------------------------------------------------------------------------
# bounding


def _zero_sum_identity(rows, c, hom, prec):
    """Does c + sum of the homogeneous rows enclose the zero row?"""
    for j in range(len(c)):
        s = iv_sum([c[j]] + [rows[i][j] for i in hom], prec)
        if not s.contains_zero():
            return False
    return True


def _floor(x):
    q = mpq(x)
    return int(q.numerator // q.denominator)


def _ceil(x):
    q = mpq(x)
    return -int((-q.numerator) // q.denominator)


def bounded_box(problem: IPProblem, U, _transform_mats=None):
    """Per-coordinate integer bounds [lo_i, hi_i] containing every feasible
    point with objective at most (1+eps) * U.

    Uses the compact parallelepiped implied by a nonsingular homogeneous row
    block whose rows sum to -c (every such row value then lies in
    [-(1+eps)U, 0]), sharpened by interval constraint propagation over all
    rows; single-variable rows contribute direct bounds.  Entries may remain
    None when nothing bounds a coordinate.
    """
    n = problem.nvars
    if n == 0:
        return []
    U = mpq(U) if U is not None else None
    mats = _transform_mats or _Matrices(problem)
    bounds = [[None, None] for _ in range(n)]
    hom = [i for i in range(len(problem.b)) if problem.b[i] == 0]
    parallelepiped_expected = False
    parallelepiped_done = False

    for prec in problem.precision.ladder():
        rows, c = mats.at(prec)

        # parallelepiped from the homogeneous block
        if U is not None and len(hom) >= n and _zero_sum_identity(rows, c, hom, prec):
            parallelepiped_expected = True
            span = mpq(1 + problem.eps) * U
            got_inverse = None
            for subset in itertools.islice(itertools.combinations(hom, n), 32):
                inv = interval_matrix_inverse([rows[i] for i in subset], prec)
                if inv is not None:
                    got_inverse = inv
                    break
            if got_inverse is not None:
                parallelepiped_done = True
                ybox = Interval.from_rational(-span, prec)
                ybox = Interval(ybox.lo, gmpy2.mpfr(0))
                for i in range(n):
                    terms = [got_inverse[i][j].mul(ybox, prec) for j in range(n)]
                    xi = iv_sum(terms, prec)
                    lo, hi = _ceil(xi.lo), _floor(xi.hi)
                    if bounds[i][0] is None or lo > bounds[i][0]:
                        bounds[i][0] = lo
                    if bounds[i][1] is None or hi < bounds[i][1]:
                        bounds[i][1] = hi

        # direct bounds from single-variable rows
        for i, row in enumerate(rows):
            nz = [j for j in range(n) if not (row[j].lo == 0 and row[j].hi == 0)]
            if len(nz) != 1:
                continue
            j = nz[0]
            coeff = row[j]
            if coeff.mignitude() == 0:
                continue
            q = Interval.from_rational(problem.b[i], prec).div(coeff, prec)
            if coeff.is_positive():
                hi = _floor(q.hi)
                if bounds[j][1] is None or hi < bounds[j][1]:
                    bounds[j][1] = hi
            else:
                lo = _ceil(q.lo)
                if bounds[j][0] is None or lo > bounds[j][0]:
                    bounds[j][0] = lo

        # constraint propagation, including the objective cap as a virtual row
        virtual = []
        if U is not None:
            virtual.append((c, mpq(1 + problem.eps) * U))
        all_rows = [(rows[i], problem.b[i]) for i in range(len(rows))] + virtual
        for _ in range(3):
            changed = False
            if any(bb[0] is not None and bb[1] is not None and bb[0] > bb[1]
                   for bb in bounds):
                return [tuple(bb) for bb in bounds]  # empty box: infeasible
            for row, bi in all_rows:
                for j in range(n):
                    coeff = row[j]
                    if coeff.mignitude() == 0:
                        continue
                    rest = []
                    ok = True
                    for l in range(n):
                        if l == j:
                            continue
                        cl = row[l]
                        if cl.lo == 0 and cl.hi == 0:
                            continue
                        if (bounds[l][0] is None or bounds[l][1] is None
                                or bounds[l][0] > bounds[l][1]):
                            ok = False
                            break
                        xl = Interval(gmpy2.mpfr(bounds[l][0], prec),
                                      gmpy2.mpfr(bounds[l][1], prec))
                        rest.append(cl.mul(xl, prec))
                    if not ok:
                        continue
                    resid = Interval.from_rational(bi, prec)
                    if rest:
                        resid = resid.sub(iv_sum(rest, prec), prec)
                    q = resid.div(coeff, prec)
                    if coeff.is_positive():
                        hi = _floor(q.hi)
                        if bounds[j][1] is None or hi < bounds[j][1]:
                            bounds[j][1] = hi
                            changed = True
                    else:
                        lo = _ceil(q.lo)
                        if bounds[j][0] is None or lo > bounds[j][0]:
                            bounds[j][0] = lo
                            changed = True
            if not changed:
                break

        if all(b[0] is not None and b[1] is not None for b in bounds):
            return [tuple(b) for b in bounds]
    if parallelepiped_expected and not parallelepiped_done:
        raise SingularSystem("homogeneous block not certifiably regular "
                             "at the precision ceiling")
    return [tuple(b) for b in bounds]


# ---------------------------------------------------------------------------
# lattice reduction of the homogeneous block (performance only)


def _lll_transform(M):
    """Unimodular T (row-major) whose columns LLL-reduce the columns of the
    square rational matrix M; identity on failure."""
    n = len(M)
    B = [[mpq(M[i][j]) for i in range(n)] for j in range(n)]  # columns
    T = [[mpq(1) if i == j else mpq(0) for i in range(n)] for j in range(n)]  # columns

    def gso():
        star, mu = [], [[mpq(0)] * n for _ in range(n)]
        for i in range(n):
            v = list(B[i])
            for j in range(i):
                den = sum(s * s for s in star[j])
                if den == 0:
                    raise ZeroDivisionError
                mu[i][j] = sum(B[i][t] * star[j][t] for t in range(n)) / den
                v = [v[t] - mu[i][j] * star[j][t] for t in range(n)]
            star.append(v)
        return star, mu

    def norm2(v):
        return sum(s * s for s in v)

    try:
        star, mu = gso()
        k = 1
        guard = 0
        while k < n and guard < 10000:
            guard += 1
            for j in range(k - 1, -1, -1):
                r = (2 * mu[k][j] + 1) // 2  # round to nearest
                if r != 0:
                    B[k] = [B[k][t] - r * B[j][t] for t in range(n)]
                    T[k] = [T[k][t] - r * T[j][t] for t in range(n)]
                    star, mu = gso()
            if norm2(star[k]) >= (mpq(3, 4) - mu[k][k - 1] ** 2) * norm2(star[k - 1]):
                k += 1
            else:
                B[k], B[k - 1] = B[k - 1], B[k]
                T[k], T[k - 1] = T[k - 1], T[k]
                star, mu = gso()
                k = max(k - 1, 1)
    except ZeroDivisionError:
        return [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    # T holds columns; return row-major with integer entries
    return [[int(T[j][i]) for j in range(n)] for i in range(n)]


def _mat_vec(T, y):
    return tuple(sum(T[i][j] * y[j] for j in range(len(y))) for i in range(len(T)))


def _int_inverse(T):
    """Exact inverse of a unimodular integer matrix."""
    n = len(T)
    aug = [[mpq(T[i][j]) for j in range(n)] + [mpq(1 if j == i else 0) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [e / pv for e in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [e - f * p for e, p in zip(aug[r], aug[col])]
    inv = [[aug[i][n + j] for j in range(n)] for i in range(n)]
    out = [[int(e) for e in row] for row in inv]
    if any(inv[i][j] != out[i][j] for i in range(n) for j in range(n)):
        raise ValueError("matrix not unimodular")
    return out


def _transformed(problem, T):
    """The problem in coordinates y with x = T y."""
    base_matrix_at = problem.matrix_at

    def matrix_at(prec):
        rows, c = base_matrix_at(prec)
        n = problem.nvars
        new_rows = [[iv_sum([row[l].scale(T[l][j]) for l in range(n) if T[l][j] != 0]
                            or [Interval.zero()], prec)
                     for j in range(n)] for row in rows]
        new_c = [iv_sum([c[l].scale(T[l][j]) for l in range(n) if T[l][j] != 0]
                        or [Interval.zero()], prec) for j in range(n)]
        return new_rows, new_c

    def wrap2(f):
        return None if f is None else (lambda y1, y2: f(_mat_vec(T, y1), _mat_vec(T, y2)))

    warm = None
    if problem.warm_start is not None:
        warm = _mat_vec(_int_inverse(T), problem.warm_start)
    return IPProblem(
        nvars=problem.nvars, b=problem.b, eps=problem.eps, warm_start=warm,
        objective_cap=problem.objective_cap, matrix_at=matrix_at,
        exact_row_sign=(None if problem.exact_row_sign is None
                        else (lambda i, y: problem.exact_row_sign(i, _mat_vec(T, y)))),
        exact_obj_cmp=wrap2(problem.exact_obj_cmp),
        exact_obj_threshold=wrap2(problem.exact_obj_threshold),
        precision=problem.precision)


# ---------------------------------------------------------------------------
# the solver


def _enumerate_feasible(problem, mats, box):
    """Depth-first enumeration over the integer box with certified pruning."""
    n = problem.nvars
    prec = problem.precision.bits
    rows, c = mats.at(prec)
    b = problem.b

    # branching order: decreasing box width
    order = sorted(range(n), key=lambda j: box[j][1] - box[j][0], reverse=True)

    cap = None
    if problem.objective_cap is not None:
        cap = mpq(1 + problem.eps) * problem.objective_cap

    found = []
    best_hi = [None]  # upper bound (mpfr) on the optimum objective so far

    def var_iv(j, assigned):
        if j in assigned:
            v = assigned[j]
            return Interval.from_rational(v, prec)
        return Interval(gmpy2.mpfr(box[j][0], prec), gmpy2.mpfr(box[j][1], prec))

    def possible(row, assigned):
        terms = []
        for j in range(n):
            e = row[j]
            if e.lo == 0 and e.hi == 0:
                continue
            terms.append(e.mul(var_iv(j, assigned), prec))
        return iv_sum(terms, prec) if terms else Interval.zero()

    def recurse(depth, assigned):
        if depth == n:
            x = tuple(assigned[j] for j in range(n))
            if _point_feasible(problem, mats, x):
                found.append(x)
                hi = iv_dot(c, x, prec).hi
                if best_hi[0] is None or hi < best_hi[0]:
                    best_hi[0] = hi
            return
        for i, row in enumerate(rows):
            if possible(row, assigned).lo > b[i]:
                return  # certified infeasible for every completion
        obj = possible(c, assigned)
        if cap is not None and obj.lo > cap:
            return
        if best_hi[0] is not None:
            # prune when even the best completion exceeds (1+eps) * incumbent
            thr = Interval.point(best_hi[0]).scale(mpq(1 + problem.eps), prec)
            if obj.lo > thr.hi:
                return
        j = order[depth]
        for v in range(box[j][0], box[j][1] + 1):
            assigned[j] = v
            recurse(depth + 1, assigned)
            del assigned[j]

    recurse(0, {})
    return found


def intprog(problem: IPProblem, _reduce=True) -> IPResult:
    """Solve the certified integer program; see the module docstring."""
    n = problem.nvars
    mats = _Matrices(problem)

    if n == 0:
        if all(problem.b[i] >= 0 for i in range(len(problem.b))):
            return IPResult(solutions=((),), objective_values=(Interval.zero(),))
        raise Infeasible("empty problem with negative bounds")

    # effective cap: objective_cap and/or certified warm start objective
    cap = problem.objective_cap
    if problem.warm_start is not None:
        if not _point_feasible(problem, mats, problem.warm_start):
            raise ValueError("warm_start is not feasible")
        _, c = mats.at(problem.precision.bits)
        warm_obj = mpq(iv_dot(c, problem.warm_start, problem.precision.bits).hi)
        cap = warm_obj if cap is None else min(cap, warm_obj)

    work = problem
    T = None
    hom = [i for i in range(len(problem.b)) if problem.b[i] == 0]
    if _reduce and n >= 2 and len(hom) >= n:
        rows, _ = mats.at(problem.precision.bits)
        mid = [[mpq(rows[i][j].mid()) for j in range(n)] for i in hom[:n]]
        T = _lll_transform(mid)
        if any(T[i][j] != (1 if i == j else 0) for i in range(n) for j in range(n)):
            work = _transformed(problem, T)
        else:
            T = None
    wmats = _Matrices(work) if T is not None else mats

    eff = IPProblem(nvars=work.nvars, b=work.b, eps=work.eps,
                    warm_start=work.warm_start, objective_cap=cap,
                    matrix_at=work.matrix_at, exact_row_sign=work.exact_row_sign,
                    exact_obj_cmp=work.exact_obj_cmp,
                    exact_obj_threshold=work.exact_obj_threshold,
                    precision=work.precision)

    box = bounded_box(eff, cap, _transform_mats=wmats)
    if any(lo is None or hi is None for lo, hi in box):
        raise UnboundedRegion("search region not provably bounded; "
                              "pass objective_cap or warm_start")
    if any(lo > hi for lo, hi in box):
        raise Infeasible("empty search box")

    found = _enumerate_feasible(eff, wmats, box)
    if T is not None:
        found = [_mat_vec(T, y) for y in found]
    if not found:
        raise Infeasible("no integer point satisfies the constraints "
                         "within the bounded region")

    def cmp(x1, x2):
        s = _obj_cmp(problem, mats, x1, x2)
        if s != 0:
            return s
        return -1 if x1 < x2 else (1 if x1 > x2 else 0)

    found = sorted(set(found), key=functools.cmp_to_key(cmp))
    x0 = found[0]
    kept = [x for x in found if _obj_within_threshold(problem, mats, x, x0)]
    prec = problem.precision.bits
    _, c = mats.at(prec)
    return IPResult(solutions=tuple(kept),
                    objective_values=tuple(iv_dot(c, x, prec) for x in kept))
