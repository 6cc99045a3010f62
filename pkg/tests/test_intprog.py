"""Certified integer programming: spec examples, the random-instance oracle,
ordering/duplicate/unimodular invariants, and the bounding device."""

import random

import numpy as np
import pytest
from gmpy2 import mpq

from pisotunit import IPProblem, Infeasible, UnboundedRegion, bounded_box, certified_le, intprog
from pisotunit.errors import NoFallbackProvided
from pisotunit.intervals import Interval


def test_minimize_box_example():
    p = IPProblem.from_rational([[-1], [1]], [-1, 5], [1], eps=0)
    r = intprog(p)
    assert r.solutions == ((1,),)
    p2 = IPProblem.from_rational([[-1], [1]], [-1, 5], [1], eps=1)
    assert intprog(p2).solutions == ((1,), (2,))


def test_findmin_shaped_instance():
    # the log-matrix mock for the quadratic field, in exact rationals
    d = mpq(2776, 10000)
    lg = mpq(8814, 10000)
    p = IPProblem.from_rational([[-lg], [-lg]], [0, -d], [lg], eps=0,
                                objective_cap=mpq(8815, 10000))
    assert intprog(p).solutions == ((1,),)


def test_infeasible_and_unbounded():
    with pytest.raises(Infeasible):
        intprog(IPProblem.from_rational([[1], [-1]], [-1, -1], [1]))
    with pytest.raises(UnboundedRegion):
        intprog(IPProblem.from_rational([[-1]], [0], [1]))


def test_zero_variables():
    r = intprog(IPProblem.from_rational([], [mpq(0)], [], eps=0))
    assert r.solutions == ((),)
    with pytest.raises(Infeasible):
        intprog(IPProblem.from_rational([], [mpq(-1)], [], eps=0))


def test_warm_start_invariant():
    p = IPProblem.from_rational([[-1], [1]], [-1, 9], [1], eps=0, warm_start=(4,))
    r = intprog(p)
    assert r.solutions[0] == (1,)
    with pytest.raises(ValueError):
        intprog(IPProblem.from_rational([[-1], [1]], [-1, 9], [1], warm_start=(11,)))


def test_ordering_and_duplicates():
    # plenty of quasi-optimal points, must come out ascending and unique
    p = IPProblem.from_rational(
        [[-1, 0], [1, 0], [0, -1], [0, 1], [-1, -1]],
        [3, 3, 3, 3, -1],
        [mpq(1), mpq(1)], eps=mpq(3))
    r = intprog(p)
    assert len(set(r.solutions)) == len(r.solutions)
    objs = [sum(x) for x in r.solutions]
    assert objs == sorted(objs)
    # lexicographic among objective ties
    for (o1, x1), (o2, x2) in zip(list(zip(objs, r.solutions))[:-1],
                                  list(zip(objs, r.solutions))[1:]):
        assert o1 < o2 or (o1 == o2 and x1 < x2)


def test_unimodular_invariance():
    d = mpq(2776, 10000)
    rows = [[mpq(-881, 1000), mpq(799, 10)],
            [mpq(881, 1000), mpq(799, 10)],
            [mpq(0), mpq(-1598, 10)]]
    B = [rows[0], [-rows[1][0], -rows[1][1]], rows[2]]
    c = rows[1]
    p1 = IPProblem.from_rational(B, [0, -d, 0], c, eps=0, objective_cap=200)
    r_red = intprog(p1, _reduce=True)
    p2 = IPProblem.from_rational(B, [0, -d, 0], c, eps=0, objective_cap=200)
    r_raw = intprog(p2, _reduce=False)
    assert r_red.solutions == r_raw.solutions


def test_bounded_box_examples():
    d = mpq(2776, 10000)
    lg = mpq(8814, 10000)
    p = IPProblem.from_rational([[-lg], [-lg]], [0, -d], [lg], eps=0)
    box = bounded_box(p, mpq(8815, 10000))
    assert box == [(1, 1)]
    # scaling U relaxes bounds monotonically
    box2 = bounded_box(p, mpq(2) * mpq(8815, 10000))
    assert box2[0][0] <= box[0][0] and box2[0][1] >= box[0][1]
    # no variables: empty box
    p0 = IPProblem.from_rational([], [mpq(0)], [], eps=0)
    assert bounded_box(p0, mpq(1)) == []


def test_certified_le_examples():
    assert certified_le(Interval.from_rational(mpq(3, 20), 64), mpq(3, 10)) is True
    assert certified_le(Interval.from_rational(mpq(9, 20), 64), mpq(3, 10)) is False
    tight = Interval(Interval.from_rational(mpq(-1, 10 ** 30), 64).lo,
                     Interval.from_rational(mpq(1, 10 ** 30), 64).hi)
    assert certified_le(tight, 0, exact_fallback=lambda: 0) is True
    assert certified_le(tight, 0, exact_fallback=lambda: 1) is False
    with pytest.raises(NoFallbackProvided):
        certified_le(tight, 0)


# ---------------------------------------------------------------------------
# the random oracle


def random_instance(rng):
    n = rng.randint(1, 3)
    R = rng.randint(2, 12)
    B, b = [], []
    for j in range(n):
        row = [0] * n
        row[j] = -1
        B.append(list(row))
        b.append(R)
        row2 = [0] * n
        row2[j] = 1
        B.append(row2)
        b.append(R)
    for _ in range(rng.randint(0, 3)):
        B.append([mpq(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n)])
        b.append(mpq(rng.randint(-8, 12), rng.randint(1, 3)))
    c = [mpq(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)]
    # half the time force the region into the positive orthant with a positive
    # objective so the positive-optimum contract holds more often
    if rng.random() < 0.6:
        c = [abs(ci) + mpq(1, 2) for ci in c]
        B.append([-1] * n)
        b.append(-1)
    eps = rng.choice([mpq(0), mpq(1, 1000)])
    return n, R, B, b, c, eps


def brute_force(n, R, B, b, c):
    """Integer-scaled numpy enumeration; exact in int64 at these sizes."""
    from math import lcm
    scale_rows = []
    for i, row in enumerate(B):
        den = lcm(*[int(mpq(x).denominator) for x in row + [b[i]]])
        scale_rows.append(([int(mpq(x) * den) for x in row], int(mpq(b[i]) * den)))
    cden = lcm(*[int(mpq(x).denominator) for x in c])
    cint = [int(mpq(x) * cden) for x in c]
    grids = np.meshgrid(*[np.arange(-R, R + 1, dtype=np.int64) for _ in range(n)],
                        indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    mask = np.ones(len(pts), dtype=bool)
    for row, bi in scale_rows:
        mask &= pts @ np.array(row, dtype=np.int64) <= bi
    feas = pts[mask]
    if not len(feas):
        return None, None
    objs = feas @ np.array(cint, dtype=np.int64)
    return feas, objs  # objective scaled by cden


def oracle_check(seed_base, count):
    rng = random.Random(seed_base)
    tested = mismatches = 0
    while tested < count:
        n, R, B, b, c, eps = random_instance(rng)
        feas, objs = brute_force(n, R, B, b, c)
        if feas is None:
            try:
                intprog(IPProblem.from_rational(B, b, c, eps=eps))
                mismatches += 1
            except Infeasible:
                pass
            continue
        zmin = objs.min()
        if zmin <= 0:
            continue  # outside the positive-optimum contract
        tested += 1
        thr = (1 + eps) * zmin
        keep = [tuple(int(v) for v in feas[i]) for i in range(len(feas))
                if objs[i] <= thr]
        keep.sort(key=lambda x: (sum(mpq(ci) * xi for ci, xi in zip(c, x)), x))
        got = intprog(IPProblem.from_rational(B, b, c, eps=eps))
        if list(got.solutions) != keep:
            mismatches += 1
    return tested, mismatches


def test_oracle_equivalence_sample():
    tested, mismatches = oracle_check(20250808, 120)
    assert tested == 120
    assert mismatches == 0


def test_singular_homogeneous_block():
    from pisotunit.errors import SingularSystem
    # homogeneous rows sum to -c but are singular: the bounding device must
    # report that instead of guessing
    B = [[1, 1], [2, 2], [mpq(-3), mpq(-3)]]
    b = [0, 0, mpq(-1)]
    c = [mpq(-3), mpq(-3)]
    p = IPProblem.from_rational(B, b, c, eps=0, objective_cap=10)
    with pytest.raises(SingularSystem):
        bounded_box(p, mpq(10))


def test_certified_le_refinable():
    from pisotunit.intervals import Interval
    calls = []

    def provider(prec):
        calls.append(prec)
        return Interval.from_rational(mpq(1, 3), prec)

    assert certified_le(provider, mpq(1, 2)) is True
    assert certified_le(provider, mpq(1, 4)) is False
    # exact boundary: 1/3 vs 1/3 straddles at every precision; callback decides
    assert certified_le(provider, mpq(1, 3), exact_fallback=lambda: 0) is True
