"""Exact field arithmetic, certified root isolation, embeddings, and the
exact reality/modulus decision procedures."""

import mpmath
import pytest
from gmpy2 import mpq

from hypothesis import given, settings, strategies as st

from pisotunit import (NumberField, NotSquarefree, certify_real_at, embed,
                       field_norm, inverse, isolate_roots, minimal_polynomial,
                       mul_mod, pow_element)
from pisotunit.errors import ZeroElement
from pisotunit.fields import FieldElement, modulus_sign_at, value_sign_at
from pisotunit.polys import RationalPoly

K2 = NumberField([-2, 0, 1])
K3 = NumberField([-1, -1, 0, 1])
KS = NumberField([1, -101, 5, -101, 1])
KCM = NumberField([49, 0, 6, 0, 1])

small = st.integers(min_value=-4, max_value=4)


def elem(field, *coeffs):
    return field.element(list(coeffs))


# -- mul_mod / inverse -------------------------------------------------------


def test_mul_mod_examples():
    assert mul_mod(elem(K2, 1, 1), elem(K2, 1, 1), K2) == elem(K2, 3, 2)
    a = elem(K3, 2, -1, 3)
    assert mul_mod(a, K3.one(), K3) == a
    th = K3.theta()
    th2 = mul_mod(th, th, K3)
    assert mul_mod(th, th2, K3) == elem(K3, 1, 1, 0)  # theta^3 = theta + 1


def test_inverse_examples():
    assert inverse(elem(K2, 1, 1), K2) == elem(K2, -1, 1)
    assert inverse(K2.one(), K2) == K2.one()
    inv = inverse(K3.theta(), K3)
    assert inv == elem(K3, -1, 0, 1)  # theta^2 - 1
    assert mul_mod(K3.theta(), inv, K3) == K3.one()
    with pytest.raises(ZeroElement):
        inverse(FieldElement([0, 0]), K2)


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=3, max_size=3))
def test_inverse_roundtrip(coeffs):
    a = FieldElement(coeffs)
    if a.is_zero():
        return
    assert mul_mod(a, inverse(a, K3), K3) == K3.one()


# -- minimal polynomials / norms ----------------------------------------------


def test_minimal_polynomial_examples():
    assert minimal_polynomial(K2.theta(), K2) == K2.defining_poly
    th2 = mul_mod(K2.theta(), K2.theta(), K2)
    assert minimal_polynomial(th2, K2) == RationalPoly([-2, 1])
    assert minimal_polynomial(KS.theta(), KS) == KS.defining_poly


def test_minpoly_of_unit_times_inverse():
    for field, a in ((K2, elem(K2, 1, 1)), (K3, elem(K3, 2, 1, -1))):
        if a.is_zero():
            continue
        prod = mul_mod(a, inverse(a, field), field)
        assert minimal_polynomial(prod, field) == RationalPoly([-1, 1])


def test_field_norm_examples():
    assert field_norm(elem(K2, 1, 1), K2) == -1
    assert field_norm(K3.theta(), K3) == 1
    assert field_norm(FieldElement.rational(2, 2), K2) == 4


@settings(max_examples=30, deadline=None)
@given(st.lists(small, min_size=2, max_size=2), st.lists(small, min_size=2, max_size=2))
def test_norm_multiplicative(ca, cb):
    a, b = FieldElement(ca), FieldElement(cb)
    if a.is_zero() or b.is_zero():
        return
    assert field_norm(mul_mod(a, b, K2), K2) == field_norm(a, K2) * field_norm(b, K2)


# -- root isolation -------------------------------------------------------------


def test_isolate_roots_signatures():
    _, sig = isolate_roots([-2, 0, 1], 32)
    assert sig == (2, 0)
    encl, sig = isolate_roots([-1, -1, 0, 1], 32)
    assert sig == (1, 1)
    assert abs(float(encl[0].real_part.lo) - 1.3247) < 1e-3
    assert abs(float(encl[1].real_part.lo) + 0.6624) < 1e-3
    assert abs(float(encl[1].imag_part.lo) - 0.5623) < 1e-3
    _, sig = isolate_roots([1, -101, 5, -101, 1], 32)
    assert sig == (2, 1)


def test_isolate_roots_rejects_nonsquarefree():
    with pytest.raises(NotSquarefree):
        isolate_roots([1, 2, 1], 32)  # (x+1)^2


def test_isolation_deterministic_and_nested():
    a32, _ = isolate_roots([-1, -1, 0, 1], 32)
    b128, _ = isolate_roots([-1, -1, 0, 1], 128)
    for lo_p, hi_p in zip(a32, b128):
        # same canonical order; higher precision nests inside a fresh call at
        # lower precision up to outward dyadic rounding
        assert float(lo_p.real_part.lo) - 1e-6 <= float(hi_p.real_part.lo)
        assert float(hi_p.real_part.hi) <= float(lo_p.real_part.hi) + 1e-6


def test_equal_real_parts_ordered_by_imaginary():
    # (x^2+1)(x^2+4): squarefree, both upper roots have real part exactly 0
    encl, sig = isolate_roots([4, 0, 5, 0, 1], 48)
    assert sig == (0, 2)
    assert encl[0].imag_part.contains(mpq(1))
    assert encl[1].imag_part.contains(mpq(2))


def test_embed_examples():
    e = embed(elem(K2, 1, 1), 2, K2, 64)
    assert abs(float(e.real_part.lo) - 2.41421356) < 1e-7
    q = embed(FieldElement.rational(mpq(3, 2), 2), 1, K2, 64)
    assert q.real_part.contains(mpq(3, 2))
    assert q.imag_part.lo == 0 == q.imag_part.hi
    c = embed(K3.theta(), 2, K3, 64)
    assert abs(float(c.modulus().lo) - 0.8688369) < 1e-6  # rho^(-1/2)


def test_embed_multiset_matches_minpoly_roots():
    # the embeddings of an element enclose the roots of its minimal polynomial
    a = elem(K3, 1, 1, 0)
    m = minimal_polynomial(a, K3)
    with mpmath.workdps(40):
        rts = mpmath.polyroots([int(c) for c in reversed(m.coeffs)],
                               maxsteps=200, extraprec=80)
        for k in range(1, 3):
            e = embed(a, k, K3, 64)
            mid = mpmath.mpc(float(e.real_part.mid()), float(e.imag_part.mid()))
            assert min(abs(mid - r) for r in rts) < 1e-9 or \
                   min(abs(mpmath.conj(mid) - r) for r in rts) < 1e-9


# -- exact reality and modulus decisions ------------------------------------------


def test_certify_real_at_examples():
    assert certify_real_at(FieldElement.rational(mpq(3, 2), 4), 1, KCM) is True
    assert certify_real_at(K3.theta(), 2, K3) is False
    u = KCM.element([1, mpq(1, 14), 0, mpq(-1, 14)])  # 1 + sqrt(2) in the CM field
    assert minimal_polynomial(u, KCM) == RationalPoly([-1, -2, 1])
    assert certify_real_at(u, 1, KCM) is True
    assert certify_real_at(u, 2, KCM) is True


def test_modulus_sign_examples():
    assert modulus_sign_at(elem(K2, 1, 1), 2, K2) == 1   # 1+sqrt2 > 1
    assert modulus_sign_at(elem(K2, 1, 1), 1, K2) == -1  # |1-sqrt2| < 1
    alpha = KS.theta()
    assert modulus_sign_at(alpha, 3, KS) == 0            # Salem circle pair
    assert modulus_sign_at(alpha, 2, KS) == 1
    assert modulus_sign_at(alpha, 1, KS) == -1
    assert modulus_sign_at(pow_element(alpha, 7, KS), 3, KS) == 0


def test_value_sign():
    assert value_sign_at(elem(K2, 1, 1), 2, K2) == 1
    assert value_sign_at(elem(K2, 1, 1), 1, K2) == -1    # 1 - sqrt2 < 0
    assert value_sign_at(FieldElement([-1, -1]), 2, K2) == -1


def test_pow_element():
    a = elem(K2, 1, 1)
    assert pow_element(a, 2, K2) == elem(K2, 3, 2)
    assert pow_element(a, 0, K2) == K2.one()
    assert pow_element(a, -1, K2) == elem(K2, -1, 1)
    assert pow_element(a, -2, K2) == mul_mod(elem(K2, -1, 1), elem(K2, -1, 1), K2)


def test_pair_product_modulus_signs():
    alpha = KS.theta()
    # alpha * (1/alpha) = 1: exactly on the circle via the product polynomial
    assert __import__("pisotunit.fields", fromlist=["x"]).pair_product_modulus_sign(alpha, 1, 2, KS) == 0
    from pisotunit.fields import pair_product_modulus_sign
    assert pair_product_modulus_sign(alpha, 2, 3, KS) == 1
    assert pair_product_modulus_sign(alpha, 1, 3, KS) == -1


def test_root_refinement_thread_safe():
    import threading
    K = NumberField([-1, -1, 0, 1])
    errs = []

    def work(bits):
        try:
            for k in (1, 2):
                e = embed(K.theta(), k, K, bits)
                assert float(e.real_part.width()) <= 2.0 ** (-bits + 4)
        except Exception as exc:  # pragma: no cover
            errs.append(exc)

    threads = [threading.Thread(target=work, args=(b,)) for b in (64, 128, 256, 96)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errs
