import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from flagcohom.errors import IndeterminateError, NotAUnitError, UsageError
from flagcohom.field import GF, QQ, Fp
from flagcohom.series import (INF, TruncatedSeries, Window, format_series, graded_slice,
                              leading_term, parse_series, series_add, series_inverse,
                              zn_valuation)

from helpers import _same_window, exact_unit, inverse_round_trip, series, triples

M = TruncatedSeries.monomial


def poly(terms: dict, n=2, field=QQ, precision=None):
    return TruncatedSeries(terms, n, field, precision)


# ---------------------------------------------------------------- addition
def test_zero_is_additive_identity():
    f = poly({(1, 0): 3, (0, -2): 1})
    assert TruncatedSeries.zero(2) + f == f


def test_cancellation():
    f = poly({(1, 0): 1, (0, 1): 1}) + poly({(1, 0): -1})
    assert f.coeffs == {(0, 1): Fraction(1)}


def test_add_takes_min_precision():
    f = poly({}, precision=(5, 5))
    g = poly({}, precision=(3, 7))
    assert series_add(f, g).precision == (3, 5)


def test_add_rejects_mismatches():
    with pytest.raises(UsageError):
        series_add(TruncatedSeries.zero(1), TruncatedSeries.zero(2))
    with pytest.raises(UsageError):
        series_add(TruncatedSeries.zero(1), TruncatedSeries.zero(1, GF(5)))


# ---------------------------------------------------------- multiplication
def test_monomial_product():
    assert M((1, 0)) * M((0, 1)) == M((1, 1))


def test_difference_of_squares():
    f = poly({(0, 0): 1, (0, 1): 1}) * poly({(0, 0): 1, (0, 1): -1})
    assert f.coeffs == {(0, 0): 1, (0, 2): -1}


def test_truncated_geometric_times_one_minus():
    g = TruncatedSeries({(k,): 1 for k in range(5)}, 1, QQ, precision=5)
    out = poly({(0,): 1, (1,): -1}, n=1) * g
    assert out.coeffs == {(0,): 1}
    assert out.precision == (5,)


def test_unknown_coefficient_raises():
    f = TruncatedSeries({(0,): 1}, 1, QQ, precision=3)
    with pytest.raises(IndeterminateError):
        f[(3,)]


# -------------------------------------------------------------- inverses
def test_inverse_of_scalar():
    assert series_inverse(TruncatedSeries.constant(2, 1), 4).coeffs == {(0,): Fraction(1, 2)}


def test_inverse_of_monomial():
    assert series_inverse(M((0, 1)), 4).coeffs == {(0, -1): 1}


def test_inverse_geometric_oracle():
    inv = series_inverse(poly({(0,): 1, (1,): -1}, n=1), 6)
    assert inv.coeffs == {(k,): 1 for k in range(6)}


def test_inverse_two_variable_unit():
    # (1 - z1^-1 z2)^-1 = sum (z1^-1 z2)^k ; z2 dominates, so the z1 pole is harmless
    f = poly({(0, 0): 1, (-1, 1): -1})
    inv = series_inverse(f, 4)
    assert inv.coeffs == {(-k, k): 1 for k in range(4)}


def test_not_a_unit():
    with pytest.raises(NotAUnitError):
        series_inverse(TruncatedSeries.zero(1, precision=4), 4)


def test_uncertified_leading_term():
    # stored leader z2^0 but z1-precision finite and z2-order below it: unknown
    # terms could sit lex-below
    f = TruncatedSeries({(0, 0): 1}, 2, QQ, precision=(3, INF), order=(0, -1))
    with pytest.raises(NotAUnitError):
        leading_term(f)


def test_inverse_over_fp():
    F = GF(7)
    inv = series_inverse(poly({(0,): 3, (1,): 1}, n=1, field=F), 5)
    prod = inv * poly({(0,): 3, (1,): 1}, n=1, field=F)
    assert prod.coeffs == {(0,): F(1)}


# ------------------------------------------------------------ valuations
def test_valuation_examples():
    assert zn_valuation(poly({(0, 3): 1, (1, 3): 1})) == 3
    assert zn_valuation(M((0, -2))) == -2
    assert zn_valuation(M((5, 0))) == 0
    assert zn_valuation(TruncatedSeries.zero(2)) == math.inf


def test_valuation_indeterminate():
    with pytest.raises(IndeterminateError):
        zn_valuation(TruncatedSeries.zero(1, precision=4))


def test_graded_slice_examples():
    f = poly({(2, 1): 1, (1, 2): 1})
    assert graded_slice(f, 1).coeffs == {(2,): 1}
    assert graded_slice(f, -3).is_zero()
    inv = series_inverse(poly({(0,): 1, (1,): 1}, n=1), 6)
    assert inv[(3,)] == -1
    inv2 = series_inverse(poly({(0, 0): 1, (0, 1): 1}), 6)
    assert graded_slice(inv2, 3).coeffs == {(0,): -1}


def test_graded_slice_beyond_precision():
    with pytest.raises(IndeterminateError):
        graded_slice(TruncatedSeries({}, 2, QQ, precision=(INF, 2)), 2)


# --------------------------------------------------------- literal format
@pytest.mark.parametrize("text", [
    "1 + z1^-1*z2 ; n=2 field=Q order=(-1,0) precision=(inf,inf)",
    "3/2*z1^2 - z2^-3 ; n=2 field=Q order=(0,-3) precision=(5,inf)",
])
def test_format_round_trip(text):
    f = parse_series(text)
    assert parse_series(format_series(f)) == f


@given(series())
def test_format_round_trip_random(f):
    assert parse_series(format_series(f)) == f


def test_window_parse_and_print():
    w = Window.parse("[-8,8]x[-8,8]")
    assert str(w) == "[-8,8]x[-8,8]" and w.size == 289
    assert Window.parse(str(Window.cube(3, 2))) == Window.cube(3, 2)


# --------------------------------------------------------- field scalars
def test_fp_arithmetic():
    a = Fp(3, 7)
    assert a * (1 / a) == 1 and a + 4 == 0 and -a == 4
    with pytest.raises(ZeroDivisionError):
        1 / Fp(0, 7)


# ---------------------------------------------------- algebraic laws
LAW_SETTINGS = settings(max_examples=200, deadline=None)


@LAW_SETTINGS
@given(triples())
def test_addition_associative(fgh):
    f, g, h = fgh
    assert (f + g) + h == f + (g + h)


@LAW_SETTINGS
@given(triples())
def test_commutative(fgh):
    f, g, _ = fgh
    assert f + g == g + f and f * g == g * f


@LAW_SETTINGS
@given(triples())
def test_multiplication_associative(fgh):
    f, g, h = fgh
    assert _same_window((f * g) * h, f * (g * h))


@LAW_SETTINGS
@given(triples())
def test_distributive(fgh):
    f, g, h = fgh
    assert _same_window(f * (g + h), f * g + f * h)


@LAW_SETTINGS
@given(st.randoms(use_true_random=False), st.integers(1, 3), st.integers(1, 5))
def test_inverse_round_trip(rng, n, target):
    unit = exact_unit(rng, n, QQ)
    assert inverse_round_trip(unit, target) is True


@given(series())
def test_product_precision_rule(f):
    g = TruncatedSeries({(0,) * f.n: 1}, f.n, f.field, precision=(4,) * f.n)
    p = f * g
    for t in range(f.n):
        assert p.precision[t] == min(f.precision[t] + g.order[t], g.precision[t] + f.order[t])
