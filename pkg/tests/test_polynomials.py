import pytest
import sympy
from hypothesis import given, settings as hypothesis_settings, strategies as st
from sympy import QQ, Poly

from src.algebra.polynomials import (
    X,
    coordinate_index,
    degree_in,
    format_poly,
    parse_poly,
    poly_compose,
    poly_iterate,
)
from src.exceptions import CompositionError, IterateTooLargeError, PolynomialParseError


def test_parse_accepts_caret_and_implicit_multiplication():
    assert parse_poly("2x^2 + 3x - 1/2") == Poly(2 * X**2 + 3 * X - sympy.Rational(1, 2), X, domain=QQ)


def test_parse_unicode_minus_and_superscripts():
    assert parse_poly("x² − 2") == parse_poly("x^2-2")


def test_parse_coordinates_sorted_by_index():
    p = parse_poly("x10 - x2 + x1")
    assert [str(g) for g in p.gens] == ["x1", "x2", "x10"]


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("", "empty polynomial"),
        ("x^2 + y", "unknown variable"),
        ("x1 + x", "mixes x"),
        ("x^2 +", "line 1"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(PolynomialParseError, match=fragment):
        parse_poly(text)


def test_parse_error_carries_line():
    with pytest.raises(PolynomialParseError) as info:
        parse_poly("x^2 + z", line=3)
    assert info.value.line == 3


def test_format_round_trips_through_parse():
    p = parse_poly("x^4+2*x^2+2")
    assert format_poly(p) == "x^4 + 2*x^2 + 2"
    assert parse_poly(format_poly(p)) == p


def test_compose_binomial():
    assert poly_compose(parse_poly("x^2"), parse_poly("x+1")) == parse_poly("x^2+2x+1")


def test_compose_self():
    f = parse_poly("x^2+1")
    assert poly_compose(f, f) == parse_poly("x^4+2x^2+2")


def test_compose_identity_outer():
    p = parse_poly("3x^3-x+7")
    assert poly_compose(parse_poly("x"), p) == p


def test_compose_rejects_multivariate():
    with pytest.raises(CompositionError, match="composition requires univariate"):
        poly_compose(parse_poly("x1*x2"), parse_poly("x1"))


def test_iterate_zero_is_identity(f):
    assert poly_iterate(f, 0) == Poly(X, X, domain=QQ)


def test_iterate_three(f):
    f3 = poly_iterate(f, 3)
    assert f3.degree() == 8
    # 0 -> 1 -> 2 -> 5
    assert f3.eval(0) == 5


def test_iterate_cap(f):
    with pytest.raises(IterateTooLargeError):
        poly_iterate(f, 20)


def test_coordinate_index():
    assert coordinate_index(sympy.Symbol("x12")) == 12
    with pytest.raises(ValueError):
        coordinate_index(sympy.Symbol("y"))


def test_degree_in_absent_generator():
    p = parse_poly("x1^3 + x2")
    assert degree_in(p, sympy.Symbol("x1")) == 3
    assert degree_in(p, sympy.Symbol("x5")) == 0


@hypothesis_settings(max_examples=25, deadline=None)
@given(
    coefficients=st.lists(st.integers(-5, 5), min_size=2, max_size=4).filter(lambda c: c[0] != 0),
    m=st.integers(0, 3),
)
def test_iterate_degree_is_power(coefficients, m):
    f = Poly(coefficients, X, domain=QQ)
    assert poly_iterate(f, m).degree() == f.degree() ** m
