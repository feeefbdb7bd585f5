"""Ordered-ring tower: sign, lambda order, classical limit, fraction field."""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import base_elements, dict_add, dict_mul, dict_poly, dict_sign, frac_scalars, scalars
from starmorita.errors import DenominatorVanishesAtZero, MalformedScalar, NotInRing
from starmorita.rings import (
    DEFORMATION,
    LAM,
    RATIONAL,
    BaseElement,
    FracScalar,
    Scalar,
    base,
    base_from_doc,
    classical_limit_scalar,
    frac,
    frac_from_doc,
    lambda_order,
    parse_rational,
    rational_sqrt,
    scalar_from_doc,
    scalar_to_doc,
    sign,
)


def test_sign_examples():
    assert sign(LAM) == 1                      # 0 < n*lam < 1
    assert sign(base(Fraction(-3, 4))) == -1
    assert sign(LAM * LAM - LAM * LAM * LAM) == 1   # lowest coefficient rules
    assert sign(base(0)) == 0


def test_lambda_order_examples():
    assert lambda_order(LAM * LAM + LAM * LAM * LAM * LAM) == 2
    assert lambda_order(base(0)) is None       # order of 0 is +infinity
    assert lambda_order(base(7)) == 0


def test_classical_limit_examples():
    two_plus = base(2) + 5 * LAM
    assert classical_limit_scalar(Scalar(two_plus)) == Scalar(base(2))
    # (1+lam)/(1-lam) -> 1: oracle evaluates numerator and denominator at 0
    one = base(1)
    f = frac(Scalar(one + LAM)) / frac(Scalar(one - LAM))
    num0, den0 = Fraction(1), Fraction(1)
    assert classical_limit_scalar(f) == Scalar(base(num0 / den0))
    with pytest.raises(DenominatorVanishesAtZero):
        classical_limit_scalar(frac(1) / frac(LAM))


def test_ring_arithmetic_examples():
    one = frac(1)
    assert (one + frac(LAM)) * (one - frac(LAM)) == one - frac(LAM) * frac(LAM)
    assert (frac(2) * frac(LAM) / frac(2)).try_demote() == Scalar(LAM)
    with pytest.raises(NotInRing):
        (frac(1) / frac(LAM)).try_demote()
    with pytest.raises(ZeroDivisionError):
        frac(1) / frac(0)


def test_parse_rational_rejects_garbage():
    assert parse_rational("-3/4") == Fraction(-3, 4)
    with pytest.raises(MalformedScalar):
        parse_rational("1/0")
    with pytest.raises(MalformedScalar):
        parse_rational("x")


@given(a=base_elements(), b=base_elements())
def test_base_arithmetic_matches_dict_oracle(a, b):
    assert dict_poly(a + b) == dict_add(dict_poly(a), dict_poly(b))
    assert dict_poly(a * b) == dict_mul(dict_poly(a), dict_poly(b))
    assert dict_sign(dict_poly(a)) == a.sign()


@given(a=base_elements(), b=base_elements())
def test_ordered_ring_axioms(a, b):
    # positives closed under + and *; trichotomy; sign multiplicativity
    if a.sign() == 1 and b.sign() == 1:
        assert (a + b).sign() == 1
        assert (a * b).sign() == 1
    assert a.sign() in (-1, 0, 1)
    assert (a.sign() == 0) == a.is_zero()
    assert (a * b).sign() == a.sign() * b.sign()
    if not a.is_zero():
        assert (a * a).sign() == 1
    # no zero divisors
    if not a.is_zero() and not b.is_zero():
        assert not (a * b).is_zero()


@given(a=base_elements(), b=base_elements())
def test_classical_limit_is_ring_homomorphism(a, b):
    cl = lambda x: x.classical_limit()
    assert cl(a + b) == cl(a) + cl(b)
    assert cl(a * b) == cl(a) * cl(b)
    if a.sign() >= 0:
        assert cl(a).sign() >= 0


@given(z=scalars(), w=scalars())
def test_scalar_conjugation(z, w):
    assert z.conj().conj() == z
    assert (z * w).conj() == z.conj() * w.conj()
    n = z.conj() * z
    assert n.im.is_zero()
    assert n.re.sign() >= 0
    assert (n.re.sign() == 0) == z.is_zero()


@given(x=frac_scalars(), y=frac_scalars())
@settings(max_examples=60)
def test_frac_field_axioms(x, y):
    assert (x + y) - y == x
    assert x * y == y * x
    if not y.is_zero():
        assert (x / y) * y == x
    # embedding preserves ring ops and sign
    if x.is_real() and y.is_real():
        assert (x * y).sign() == x.sign() * y.sign()


@given(x=frac_scalars())
@settings(max_examples=60)
def test_frac_canonical_form(x):
    assert x.den.sign() == 1
    low = next(c for c in x.den.coeffs if c != 0)
    assert low == 1
    assert x.conj().conj() == x
    n = x.conj() * x
    assert n.is_real() and n.sign() >= 0


def test_embedding_scalar_to_frac_preserves_ops():
    a, b = Scalar(base(3), base(-2)), Scalar(LAM, base(1))
    assert frac(a) + frac(b) == frac(a + b)
    assert frac(a) * frac(b) == frac(a * b)


def test_serialization_roundtrip():
    z = Scalar(base(Fraction(2, 3)), LAM + base(1, DEFORMATION))
    doc = scalar_to_doc(z)
    assert scalar_from_doc(doc, DEFORMATION) == z
    assert base_from_doc("5/3", RATIONAL) == base(Fraction(5, 3))
    f = frac_from_doc({"re": "1/2", "im": "0"}, RATIONAL)
    assert f == frac(Fraction(1, 2))
    with pytest.raises(MalformedScalar):
        base_from_doc("1/0", RATIONAL)


def test_rational_sqrt():
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(2) is None
    assert rational_sqrt(Fraction(-1)) is None
    assert rational_sqrt(0) == 0
