"""Directed-rounding soundness of the interval layer: every operation must
enclose the exact rational result, at full operand precision."""

from fractions import Fraction

from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from pisotunit.intervals import (ComplexEnclosure, Interval,
                                 eval_poly_interval, interval_matrix_inverse,
                                 iv_dot, iv_sum, mpfr_down, mpfr_up)

fractions = st.fractions(min_value=-1000, max_value=1000)


def iv(f, prec=64):
    return Interval.from_rational(mpq(f.numerator, f.denominator), prec)


@settings(max_examples=100, deadline=None)
@given(fractions, fractions)
def test_add_sub_mul_enclose(a, b):
    x, y = iv(a), iv(b)
    assert x.add(y).contains(mpq(a + b))
    assert x.sub(y).contains(mpq(a - b))
    assert x.mul(y).contains(mpq(a * b))


@settings(max_examples=100, deadline=None)
@given(fractions, fractions.filter(lambda b: b != 0))
def test_div_encloses(a, b):
    q = iv(a).div(iv(b))
    assert q.contains(mpq(a) / mpq(b))


@settings(max_examples=60, deadline=None)
@given(fractions)
def test_neg_abs_square(a):
    x = iv(a)
    assert x.neg().contains(-mpq(a))
    assert x.abs().contains(abs(mpq(a)))
    assert x.square().contains(mpq(a) * mpq(a))


def test_neg_preserves_precision():
    # regression: bare mpfr negation rounds to the ambient 53-bit context
    x = Interval.from_rational(mpq(1, 3), 200)
    n = x.neg()
    assert n.lo.precision >= 200
    assert mpq(n.lo) == -mpq(x.hi) and mpq(n.hi) == -mpq(x.lo)


def test_log_sqrt_enclose():
    import mpmath
    x = Interval.from_rational(mpq(2), 128)
    lg = x.log(128)
    with mpmath.workdps(50):
        truth = mpmath.log(2)
        assert mpq(lg.lo) < mpq(str(truth)) + mpq(1, 10 ** 30) < mpq(lg.hi) + mpq(1, 10 ** 29)
    s = x.sqrt(128)
    assert mpq(s.lo) ** 2 <= 2 <= mpq(s.hi) ** 2


def test_rounding_direction():
    third = mpq(1, 3)
    lo, hi = mpfr_down(third, 64), mpfr_up(third, 64)
    assert mpq(lo) < third < mpq(hi)


def test_interval_membership_after_dot():
    row = [Interval.from_rational(mpq(1, 3), 64), Interval.from_rational(mpq(-2, 7), 64)]
    got = iv_dot(row, (3, 7), 64)
    assert got.contains(mpq(1) - mpq(2))
    total = iv_sum(row, 64)
    assert total.contains(mpq(1, 3) - mpq(2, 7))


def test_complex_mul_and_modulus():
    z = ComplexEnclosure(Interval.from_rational(3, 64), Interval.from_rational(4, 64))
    sq = z.mul(z)
    assert sq.real_part.contains(mpq(-7))
    assert sq.imag_part.contains(mpq(24))
    assert z.abs_squared().contains(mpq(25))
    assert z.modulus().contains(mpq(5))


def test_eval_poly_interval_contains_exact():
    coeffs = [mpq(1), mpq(-101), mpq(5), mpq(-101), mpq(1)]
    z = ComplexEnclosure(Interval.from_rational(mpq(3, 2), 96),
                         Interval.from_rational(mpq(-1, 4), 96), 96)
    got = eval_poly_interval(coeffs, z, 96)
    x, y = Fraction(3, 2), Fraction(-1, 4)
    re, im = Fraction(0), Fraction(0)
    cre, cim = Fraction(1), Fraction(0)  # z^0
    for c in [Fraction(1), Fraction(-101), Fraction(5), Fraction(-101), Fraction(1)]:
        re += c * cre
        im += c * cim
        cre, cim = cre * x - cim * y, cre * y + cim * x
    assert got.real_part.contains(mpq(re.numerator, re.denominator))
    assert got.imag_part.contains(mpq(im.numerator, im.denominator))


def test_interval_matrix_inverse():
    rows = [[Interval.from_rational(2, 96), Interval.from_rational(1, 96)],
            [Interval.from_rational(1, 96), Interval.from_rational(1, 96)]]
    inv = interval_matrix_inverse(rows, 96)
    # inverse of [[2,1],[1,1]] is [[1,-1],[-1,2]]
    assert inv[0][0].contains(mpq(1)) and inv[0][1].contains(mpq(-1))
    assert inv[1][0].contains(mpq(-1)) and inv[1][1].contains(mpq(2))
    singular = [[Interval.from_rational(1, 64), Interval.from_rational(1, 64)],
                [Interval.from_rational(1, 64), Interval.from_rational(1, 64)]]
    assert interval_matrix_inverse(singular, 64) is None
