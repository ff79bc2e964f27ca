import pytest
import sympy
from hypothesis import given, settings as hypothesis_settings, strategies as st
from sympy import QQ, Poly

from src.algebra.polynomials import X, parse_poly
from src.dynamics.classify import chebyshev, classify, conjugate, normal_form
from src.exceptions import DegreeError
from src.models.reports import ClassKind


@pytest.mark.parametrize("d,text", [(1, "x"), (2, "x^2-2"), (3, "x^3-3x"), (4, "x^4-4x^2+2")])
def test_chebyshev_small_degrees(d, text):
    assert chebyshev(d) == parse_poly(text)


@pytest.mark.parametrize("d", range(1, 17))
def test_chebyshev_defining_identity(d):
    u = sympy.Symbol("u")
    lhs = chebyshev(d).as_expr().subs(X, u + 1 / u)
    assert sympy.simplify(sympy.expand(lhs * u**d) - (u ** (2 * d) + 1)) == 0


@pytest.mark.parametrize("d,e", [(d, e) for d in range(1, 5) for e in range(1, 5)])
def test_chebyshev_family_commutes(d, e):
    assert chebyshev(d).compose(chebyshev(e)) == chebyshev(d * e)


def test_normal_form_scales_the_leading_coefficient():
    nf = normal_form(parse_poly("2x^2"))
    assert nf.g == Poly(X**2, X, domain=QQ)
    assert nf.alpha == sympy.Rational(1, 2)
    assert nf.is_pure_power


def test_normal_form_of_normalized_map(f):
    nf = normal_form(f)
    assert nf.g == f
    assert nf.beta == 0 and nf.alpha == 1
    assert nf.gap == 2


def test_normal_form_shift_can_reach_a_power_map():
    nf = normal_form(parse_poly("x^2+2x"))
    assert nf.beta == -1
    assert nf.g == Poly(X**2, X, domain=QQ)


def test_normal_form_is_idempotent():
    nf = normal_form(parse_poly("x^3+3x^2+x-4"))
    assert normal_form(nf.g).g == nf.g


def test_normal_form_needs_degree_two():
    with pytest.raises(DegreeError):
        normal_form(parse_poly("5x+1"))


@pytest.mark.parametrize(
    "text,label",
    [
        ("x^2-2", "chebyshev(+)"),
        ("x^3-3x", "chebyshev(+)"),
        ("x^2+1", "disintegrated"),
        ("x^3+x", "disintegrated"),
        ("3x^3", "power"),
        ("2x^2", "power"),
        ("x^2+2x", "power"),
        ("x^4+2x^2+2", "disintegrated"),
    ],
)
def test_classify_labels(text, label):
    assert classify(parse_poly(text)).label == label


def test_chebyshev_label_records_the_scale():
    label = classify(parse_poly("x^2-2"))
    assert label.kind == ClassKind.CHEBYSHEV
    assert label.sign == 1
    data = label.to_dict()
    assert data["scale_minpoly"] == "x - 1"


def test_negative_chebyshev_sign():
    label = classify(parse_poly("-x^3+3x"))
    assert label.kind == ClassKind.CHEBYSHEV


def test_conjugate_rejects_degenerate_map(f):
    with pytest.raises(ValueError):
        conjugate(f, 0, 1)


@hypothesis_settings(max_examples=30, deadline=None)
@given(
    text=st.sampled_from(["x^2-2", "x^2+1", "x^3+x", "3x^3", "x^3-3x"]),
    a=st.integers(-4, 4).filter(lambda v: v != 0),
    b=st.integers(-3, 3),
)
def test_classification_is_conjugation_invariant(text, a, b):
    f = parse_poly(text)
    assert classify(conjugate(f, sympy.Integer(a), sympy.Integer(b))).kind == classify(f).kind
