from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from persalg.novikov import (
    NOV_ONE,
    NOV_ZERO,
    NovikovElement,
    inversion_recursion,
    series_divisor_sum,
    series_generate,
    series_odd_squares,
    series_theta,
)

exponents = st.fractions(min_value=-4, max_value=4, max_denominator=8)
elements = st.lists(exponents, max_size=6).map(NovikovElement.from_exponents)


def test_char2_addition():
    t = NovikovElement.monomial(F(1, 2))
    assert (t + t).is_zero()


def test_cancellation():
    a = NovikovElement.from_exponents([0, 1])
    b = NovikovElement.from_exponents([1, 2])
    assert (a + b).exponents == (F(0), F(2))


def test_additive_identity():
    f = series_odd_squares(200)
    assert (f + NOV_ZERO.truncate(200)).exponents == f.exponents


def test_squaring_char2():
    a = NovikovElement.parse("1 + T^{1/2}")
    assert str(a * a) == "1 + T"


def test_monomial_products():
    q = NovikovElement.monomial(F(1, 4))
    assert (q * q).exponents == (F(1, 2),)
    f = NovikovElement.from_exponents([1, 9]) * NovikovElement.monomial(-1)
    assert f.exponents == (F(0), F(8))


def test_valuation():
    assert NovikovElement.from_exponents([F(1, 2), 2]).valuation == F(1, 2)
    assert NOV_ZERO.valuation == float("inf")
    assert (NovikovElement.monomial(-1) * NovikovElement.from_exponents([0, 8])).valuation == -1


@given(elements, elements, elements)
@settings(max_examples=150, deadline=None)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(elements, elements)
@settings(max_examples=150, deadline=None)
def test_valuation_multiplicative(a, b):
    if a.is_zero() or b.is_zero():
        return
    assert (a * b).valuation == a.valuation + b.valuation


def test_invert_monomial():
    assert NovikovElement.monomial(3).invert(10) == NovikovElement.monomial(-3)


def test_invert_one():
    inv = NOV_ONE.invert(50)
    assert inv.exponents == (F(0),)


def test_inversion_example_precision_26():
    f = series_odd_squares(26)
    inv = f.invert(26)
    # T^{-1}(1 + T^8 + T^16): the g_24 coefficient vanishes mod 2
    assert inv.exponents == (F(-1), F(7), F(15))
    prod = f * inv
    assert prod.exponents == (F(0),)
    assert prod.precision >= 25


def test_gn_recursion_oracle():
    """The recursion g_n = sum_{e in E\\{0}, e<=n} g_{n-e} over the shifted
    exponent set is an independent oracle for the geometric-series
    inversion."""
    f = series_odd_squares(202)
    E = [e - 1 for e in f.exponents]
    g = inversion_recursion(E, 200)
    assert g[8] == 1 and g[16] == 1 and g[24] == 0
    inv = f.invert(201)
    expected = sorted(F(n - 1) for n, gn in enumerate(g) if gn)
    got = [e for e in inv.exponents if e <= 199]
    assert got == [e for e in expected if e <= 199]


def test_inversion_identity_precision_200():
    f = series_odd_squares(201)
    inv = f.invert(200)
    prod = f * inv
    assert prod.coefficient(0) == 1
    assert all(e == 0 for e in prod.exponents)
    assert prod.precision >= 200


@given(elements, st.integers(min_value=5, max_value=24))
@settings(max_examples=200, deadline=None)
def test_invert_random(a, prec):
    if a.is_zero():
        return
    b = a.invert(prec)
    prod = a * b
    assert prod.coefficient(0) == 1
    assert all(e >= prec for e in prod.exponents if e != 0)


def test_invert_zero_raises():
    with pytest.raises(ZeroDivisionError):
        NOV_ZERO.invert(5)


def test_series_odd_squares():
    assert series_odd_squares(26).exponents == (F(1), F(9), F(25))


def test_series_theta_quarter():
    th = series_theta(F(1, 4), 1, 2)
    assert th.exponents == (F(1, 16), F(9, 16), F(25, 16))


def test_series_theta_equals_odd_squares():
    # sum_{n>=0} T^{(2n+1)^2} = theta_{1/4,0}(16,0)
    assert series_theta(F(1, 4), 16, 200).exponents == series_odd_squares(200).exponents


def test_series_divisor_sum_oracle():
    """Frozen from brute-force divisor enumeration: among (2k+1)/3 < 2 the
    exponent 5/3 has the two divisors 1, 5 = -1 mod 6 and cancels, while
    3/3 = 1 has only d = 1 and survives."""
    assert series_divisor_sum(3, 2).exponents == (F(1, 3), F(1))


def test_series_divisor_lowest_term():
    for N in (2, 3, 4, 5):
        s = series_divisor_sum(N, 1)
        assert s.valuation == F(1, N)


def test_series_generate_dispatch():
    assert series_generate("odd_squares", 10) == series_odd_squares(10)
    assert series_generate("theta", 2, beta=F(1, 4), scale=1) == series_theta(F(1, 4), 1, 2)
    assert series_generate("divisor_sum", 2, n=3) == series_divisor_sum(3, 2)
    with pytest.raises(ValueError):
        series_generate("nope", 1)


def test_text_round_trip():
    vals = [NOV_ZERO, NOV_ONE, series_odd_squares(30),
            NovikovElement.from_exponents([F(-1, 2), 0, F(3, 7)])]
    for v in vals:
        assert NovikovElement.parse(str(v)).exponents == v.exponents


def test_json_round_trip():
    v = NovikovElement.from_exponents([F(-1, 2), 0, F(3, 7)])
    assert NovikovElement.from_json(v.to_json()) == v


def test_precision_tracking_mul():
    a = NovikovElement((F(0),), precision=F(5))
    b = NovikovElement((F(2),))
    assert (a * b).precision == F(7)
    z = NovikovElement((), precision=F(3))
    assert (z * z).precision == F(6)


def test_coefficient_beyond_precision_raises():
    a = NovikovElement((F(0),), precision=F(5))
    with pytest.raises(ValueError):
        a.coefficient(6)


def test_invert_truncated_input_never_overclaims():
    a = NovikovElement((F(0), F(2)), precision=F(5))
    b = a.invert(100)
    assert b.precision == 5
    prod = a * b
    assert prod.exponents == (F(0),) and prod.precision == 5
