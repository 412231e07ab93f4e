from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from upto.semirings import (SemiringValidationError, boolean_semiring, check_laws, check_monotonicity,
                            get_semiring, nonneg_rationals, rationals, validate)

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def test_boolean_order_and_flags():
    b = boolean_semiring()
    assert b.leq(False, True) and not b.leq(True, False)
    assert b.monotone_add and b.monotone_mul


def test_nonneg_product_example():
    s = nonneg_rationals()
    assert s.leq(1, 2) and s.leq(3, 3) and s.leq(s.mul(1, 3), s.mul(2, 3))


def test_rationals_flags():
    q = rationals()
    assert q.monotone_add and not q.monotone_mul


@pytest.mark.parametrize("factory, add_ok, mul_ok", [
    (boolean_semiring, True, True),
    (nonneg_rationals, True, True),
    (rationals, True, False),
])
def test_monotonicity_reports(factory, add_ok, mul_ok):
    r = check_monotonicity(factory())
    assert (r.add_holds, r.mul_holds) == (add_ok, mul_ok)


def test_rationals_product_witness_is_genuine():
    q = rationals()
    n1, m1, n2, m2 = check_monotonicity(q).mul_witness
    assert n1 <= m1 and n2 <= m2 and not n1 * n2 <= m1 * m2


@pytest.mark.parametrize("factory", [boolean_semiring, nonneg_rationals, rationals])
def test_laws_hold_on_grid(factory):
    assert check_laws(factory()) == []


def test_validation_rejects_false_flag():
    lying = replace(rationals(), monotone_mul=True)
    with pytest.raises(SemiringValidationError):
        validate(lying)


def test_get_semiring_unknown():
    with pytest.raises(KeyError):
        get_semiring("tropical")


@pytest.mark.parametrize("text, value", [("1/2", Fraction(1, 2)), ("-3", Fraction(-3)), ("4/6", Fraction(2, 3))])
def test_parse_rationals_lowest_terms(text, value):
    v = rationals().parse(text)
    assert v == value and v.denominator == value.denominator


def test_nonneg_parse_rejects_negative():
    with pytest.raises(ValueError):
        nonneg_rationals().parse("-1")


def test_no_floats():
    assert isinstance(rationals().parse("1/2"), Fraction)
    with pytest.raises(ValueError):
        rationals().parse("0.5")


@given(fractions, fractions, fractions)
def test_rational_laws_sampled(a, b, c):
    q = rationals()
    assert q.mul(a, q.add(b, c)) == q.add(q.mul(a, b), q.mul(a, c))
    assert q.add(q.add(a, b), c) == q.add(a, q.add(b, c))


@given(fractions, fractions, fractions, fractions)
def test_rational_addition_monotone(n1, m1, n2, m2):
    if n1 <= m1 and n2 <= m2:
        assert n1 + n2 <= m1 + m2
