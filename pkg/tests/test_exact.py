import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from su3cg.exact import (
    DivisorNotRationalizable,
    ExactReal,
    HalfInt,
    MalformedHalfInt,
    binomial,
    canonicalize,
    factorial,
    factorial_ratio,
    sqrt_factorials,
    square_split,
    to_twice,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=30)
radicands = st.sampled_from([1, 2, 3, 5, 6, 7, 10, 12, 18, 50])


@st.composite
def reals(draw, max_terms=3):
    terms = draw(st.lists(st.tuples(rationals, radicands), max_size=max_terms))
    return canonicalize(terms)


def test_sqrt_canonical_form():
    assert ExactReal.sqrt(8) == 2 * ExactReal.sqrt(2)
    assert ExactReal.sqrt(Fraction(1, 2)) == ExactReal.sqrt(2) / 2
    assert str(ExactReal.sqrt(Fraction(7, 5))) == "(1/5)*sqrt(35)"
    assert ExactReal.sqrt(0).is_zero()
    assert ExactReal.sqrt(9).is_rational()


def test_square_split():
    assert square_split(Fraction(12, 5)) == (Fraction(2, 5), 15)
    with pytest.raises(ValueError):
        square_split(-3)


def test_str_parse_roundtrip_examples():
    for text in ["0", "-7/40", "sqrt(2)", "-(7/40)*sqrt(2)", "3*sqrt(5) - 1/2"]:
        v = ExactReal.parse(text)
        assert ExactReal.parse(str(v)) == v
    with pytest.raises(ValueError):
        ExactReal.parse("sqrt(2")


def test_sign_of_near_cancellation():
    # 99^2 * 2 = 19602 vs 140^2 = 19600
    assert (99 * ExactReal.sqrt(2) - 140).sign() == 1
    assert (140 - 99 * ExactReal.sqrt(2)).sign() == -1
    assert (ExactReal.sqrt(2) + ExactReal.sqrt(3) - ExactReal.sqrt(10)).sign() == -1


def test_inverse_and_division():
    x = 1 + ExactReal.sqrt(2)
    assert x.inverse() == ExactReal.sqrt(2) - 1
    assert (ExactReal.sqrt(6) / ExactReal.sqrt(3)) == ExactReal.sqrt(2)
    with pytest.raises(ZeroDivisionError):
        ExactReal().inverse()


def test_decimal_and_latex():
    assert ExactReal.sqrt(2).to_decimal(10).startswith("1.41421356")
    assert ExactReal.parse("-(7/40)*sqrt(2)").to_latex() == "-\\frac{7}{40}\\sqrt{2}"


def test_json_roundtrip():
    v = ExactReal.parse("(3/4)*sqrt(7) - 2")
    assert ExactReal.from_json(v.to_json()) == v


def test_halfint():
    assert HalfInt("3/2").twice == 3
    assert HalfInt(2) + HalfInt("1/2") == HalfInt("5/2")
    assert to_twice(Fraction(5, 2)) == 5
    assert to_twice("1/2") == 1
    with pytest.raises(MalformedHalfInt):
        to_twice(Fraction(1, 3))
    with pytest.raises(MalformedHalfInt):
        int(HalfInt("1/2"))


def test_factorials():
    assert factorial(20) == math.factorial(20)
    assert binomial(10, 3) == 120
    assert factorial_ratio([5], [3, 2]) == 10
    assert sqrt_factorials(num=(4,), den=(2,)) == ExactReal.sqrt(12)
    assert sqrt_factorials(num=(300,), den=(300,)) == 1
    assert sqrt_factorials(num_ints=(0,)).is_zero()


@given(reals(), reals(), reals())
def test_field_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0


@given(reals())
def test_inverse_property(a):
    if a.is_zero():
        return
    try:
        inv = a.inverse()
    except DivisorNotRationalizable:
        return
    assert a * inv == 1


@given(reals(), reals())
def test_sign_matches_float(a, b):
    d = a - b
    f = float(a) - float(b)
    if abs(f) > 1e-9:
        assert d.sign() == (1 if f > 0 else -1)


@given(reals())
def test_parse_roundtrip(a):
    assert ExactReal.parse(str(a)) == a
    assert ExactReal.from_json(a.to_json()) == a


@given(st.fractions(min_value=0, max_value=1000, max_denominator=50))
def test_sqrt_squares_back(q):
    r = ExactReal.sqrt(q)
    assert r * r == q
