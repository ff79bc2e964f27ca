from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings as hypothesis_settings, strategies as st
from sympy import Poly

from src.algebra.algebraic import AlgebraicNumber, P1Point, algebraic_combine, evaluate_at, parse_point, root_of_unity
from src.algebra.polynomials import X, ZETA, parse_poly
from src.dynamics.heights import (
    HeightValue,
    canonical_bound_coefficients,
    canonical_bound_constant,
    canonical_difference_constant,
    canonical_height,
    height_expansion_constant,
    height_n,
    inequality_constants,
    lower_height_constant,
    preperiodic_structure,
    tate_estimate,
    upper_height_constant,
    weil_height,
)
from src.exceptions import DegreeError

TOLERANCE = mpmath.mpf("1e-20")

rationals = st.fractions(min_value=Fraction(-200), max_value=Fraction(200), max_denominator=50).map(
    lambda q: sympy.Rational(q.numerator, q.denominator)
)
nonzero_rationals = rationals.filter(lambda q: q != 0)


def test_weil_height_rational_is_exact():
    h = weil_height(sympy.Rational(3, 2))
    assert h.exact
    assert h.value == pytest.approx(float(mpmath.log(3)))


def test_weil_height_of_zero_and_infinity():
    assert weil_height(0).value == 0
    assert weil_height(P1Point.infinity()).value == 0


def test_weil_height_sqrt2():
    h = weil_height(parse_point("x^2-2@1.41"))
    assert not h.exact
    assert abs(h.value - mpmath.log(2) / 2) <= h.error_radius + TOLERANCE


def test_weil_height_shared_by_conjugates():
    plus = weil_height(parse_point("x^2-3x+1@2.6"))
    minus = weil_height(parse_point("x^2-3x+1@0.4"))
    assert float(plus.value) == pytest.approx(float(minus.value))


def test_height_n_sums_coordinates():
    h = height_n([sympy.Rational(3, 2), parse_point("x^2-2@1.41")])
    expected = mpmath.log(3) + mpmath.log(2) / 2
    assert abs(h.value - expected) <= h.error_radius + TOLERANCE
    assert float(height_n([1, 2]).value) == pytest.approx(float(mpmath.log(2)))


def test_height_n_needs_coordinates():
    with pytest.raises(ValueError):
        height_n([])


@hypothesis_settings(max_examples=50, deadline=None)
@given(a=nonzero_rationals, b=nonzero_rationals)
def test_weil_height_inequalities(a, b):
    h = lambda q: weil_height(q).value  # noqa: E731
    assert h(a * b) <= h(a) + h(b) + TOLERANCE
    assert h(a) - h(b) <= h(a / b) + TOLERANCE
    assert h(a + b) <= h(a) + h(b) + mpmath.log(2) + TOLERANCE
    assert h(a) - h(b) - mpmath.log(2) <= h(a - b) + TOLERANCE
    assert abs(h(a**3) - 3 * h(a)) <= TOLERANCE
    assert abs(h(1 / a) - h(a)) <= TOLERANCE


ALGEBRAIC_POINTS = [
    "x^2-2@1.41",
    "x^2+1@0,1",
    "x^2-x-1@1.6",
    "x^3-2@1.26",
    "x^4-2@1.19",
    "2x^2-3@1.22",
    "x^2+x+1@-0.5,0.87",
    "7/3",
]


def _algebraic(text: str) -> AlgebraicNumber:
    return parse_point(text).value


@hypothesis_settings(max_examples=20, deadline=None)
@given(left=st.sampled_from(ALGEBRAIC_POINTS), right=st.sampled_from(ALGEBRAIC_POINTS))
def test_weil_height_inequalities_on_algebraic_pairs(left, right):
    a, b = _algebraic(left), _algebraic(right)
    ha, hb = weil_height(a), weil_height(b)

    product = weil_height(algebraic_combine(a, b, "*"))
    assert product.lower <= ha.upper + hb.upper + TOLERANCE

    total = weil_height(algebraic_combine(a, b, "+"))
    assert total.lower <= ha.upper + hb.upper + mpmath.log(2) + TOLERANCE

    inverse = weil_height(algebraic_combine(AlgebraicNumber.from_rational(1), a, "/"))
    assert abs(inverse.value - ha.value) <= inverse.error_radius + ha.error_radius + TOLERANCE

    square = weil_height(algebraic_combine(a, a, "*"))
    assert abs(square.value - 2 * ha.value) <= square.error_radius + 2 * ha.error_radius + TOLERANCE


def test_expansion_constant_of_monomial_is_tight():
    assert height_expansion_constant(parse_poly("x^2")) == 0
    assert float(height_expansion_constant(parse_poly("3x^2"))) == pytest.approx(float(mpmath.log(3)))


def test_expansion_constant_needs_degree_two():
    with pytest.raises(DegreeError):
        height_expansion_constant(parse_poly("2x+1"))


@hypothesis_settings(max_examples=60, deadline=None)
@given(a=rationals, text=st.sampled_from(["x^2+1", "2x^3+x", "x^2-x/3"]))
def test_expansion_constant_audit(a, text):
    f = parse_poly(text)
    C = height_expansion_constant(f)
    d = f.degree()
    image = sympy.Rational(f.eval(a))
    assert abs(weil_height(image).value - d * weil_height(a).value) <= C + TOLERANCE


def test_preperiodic_structure():
    assert preperiodic_structure(parse_poly("x^2-2"), 2) == (0, 1)
    assert preperiodic_structure(parse_poly("x^2-2"), -2) == (1, 1)
    assert preperiodic_structure(parse_poly("x^2+1"), 1) is None


def test_canonical_height_fixed_point_is_zero():
    h = canonical_height(parse_poly("x^2-2"), 2)
    assert h.exact and h.value == 0


def test_canonical_height_of_power_map_is_weil_height():
    h = canonical_height(parse_poly("x^2"), 3)
    assert abs(h.value - mpmath.log(3)) <= h.error_radius + TOLERANCE


def test_canonical_height_matches_tate_quotient(f):
    h = canonical_height(f, 1, 1e-8)
    assert h.error_radius <= 1e-8
    orbit = 1
    for _ in range(6):
        orbit = orbit**2 + 1
    assert orbit == 210066388901
    quotient = mpmath.log(orbit) / 2**6
    assert abs(h.value - quotient) <= height_expansion_constant(f) / 2**6 + h.error_radius


def test_canonical_height_scales_along_the_orbit(f):
    h1 = canonical_height(f, 1, 1e-10)
    h2 = canonical_height(f, 2, 1e-10)
    assert abs(h2.value - 2 * h1.value) <= h1.error_radius * 2 + h2.error_radius + 1e-12


@hypothesis_settings(max_examples=15, deadline=None)
@given(a=st.fractions(min_value=Fraction(-20), max_value=Fraction(20), max_denominator=10))
def test_canonical_height_functional_equation_for_odd_cubic(a):
    f = parse_poly("x^3+x")
    a = sympy.Rational(a.numerator, a.denominator)
    image = sympy.Rational(f.eval(a))
    h = canonical_height(f, a, 1e-8)
    h_image = canonical_height(f, image, 1e-8)
    assert abs(h_image.value - 3 * h.value) <= 3 * h.error_radius + h_image.error_radius + 1e-12


def test_canonical_height_with_bad_primes():
    f = parse_poly("x^2/2+1")
    h = canonical_height(f, sympy.Rational(1, 3), 1e-6)
    tate = tate_estimate(f, sympy.Rational(1, 3), 5)
    assert abs(h.value - tate.value) <= h.error_radius + tate.error_radius


def test_canonical_height_of_infinity(f):
    assert canonical_height(f, P1Point.infinity()).is_infinite


def test_canonical_height_rejects_linear_maps():
    with pytest.raises(DegreeError):
        canonical_height(parse_poly("x+1"), 1)


def test_canonical_height_target_must_be_positive(f):
    with pytest.raises(ValueError):
        canonical_height(f, 1, 0.0)


def test_height_value_arithmetic():
    total = HeightValue(mpmath.mpf(1), mpmath.mpf("0.1")) + HeightValue.zero()
    assert total.lower == mpmath.mpf("0.9")
    assert total.upper == mpmath.mpf("1.1")
    assert not total.exact
    assert total.scaled(2).error_radius == mpmath.mpf("0.2")


@pytest.mark.parametrize(
    "text,expected",
    [("x2-x1-1", mpmath.log(3)), ("x1", 0), ("2*x1*x2", mpmath.log(2))],
)
def test_upper_height_constant(text, expected):
    assert float(upper_height_constant(parse_poly(text))) == pytest.approx(float(expected), abs=1e-30)


def test_upper_height_constant_over_the_gaussian_field():
    rotation = Poly(ZETA * X**5 + ZETA * X, X, ZETA)
    assert float(upper_height_constant(rotation, 4)) == pytest.approx(float(mpmath.log(2)), abs=1e-12)

    shifted = Poly((1 + ZETA) * X + 3, X, ZETA)
    expected = mpmath.log(2) / 2 + mpmath.log(3) + mpmath.log(2)
    assert float(upper_height_constant(shifted, 4)) == pytest.approx(float(expected), abs=1e-12)


@hypothesis_settings(max_examples=15, deadline=None)
@given(a=rationals)
def test_upper_height_constant_over_the_gaussian_field_audit(a):
    g = Poly((1 + ZETA) * X**2 + 3, X, ZETA)
    C1 = upper_height_constant(g, 4)
    image = evaluate_at(g, [AlgebraicNumber.from_rational(a)], root_of_unity(1, 4))
    assert weil_height(image).lower <= 2 * weil_height(a).value + C1 + TOLERANCE


def test_lower_height_constant_for_hyperbola(xs):
    x1, x2, _ = xs
    assert float(lower_height_constant(parse_poly("x1*x2-1"), x2)) == pytest.approx(float(2 * mpmath.log(2)))


def test_lower_height_constant_univariate_pivot():
    x = sympy.Symbol("x")
    assert lower_height_constant(parse_poly("x"), x) == 0


def test_lower_height_constant_needs_the_pivot(xs):
    x1, _, x3 = xs
    with pytest.raises(DegreeError):
        lower_height_constant(parse_poly("x1-1"), x3)


@hypothesis_settings(max_examples=40, deadline=None)
@given(a1=rationals, a2=rationals)
def test_lower_height_constant_audit(a1, a2):
    x2 = sympy.Symbol("x2")
    F = parse_poly("x2-x1-1")
    C2 = lower_height_constant(F, x2)
    h = lambda q: weil_height(q).value  # noqa: E731
    assert h(a2) - 2 * h(a1) - C2 <= h(a2 - a1 - 1) + TOLERANCE


def test_canonical_bound_constant_assembly(f, xs):
    x1, x2, _ = xs
    F = parse_poly("x2-x1-1")
    assert canonical_bound_coefficients(F, x2) == {x1: 2}
    expected = lower_height_constant(F, x2) + canonical_difference_constant(f) * 3
    assert float(canonical_bound_constant(F, f, x2)) == pytest.approx(float(expected))


def test_inequality_constants_provenance(f, xs):
    _, x2, _ = xs
    constants = inequality_constants(parse_poly("x2-x1-1"), f, x2)
    assert [entry.constant for entry in constants.provenance] == ["C1", "C2", "C_f", "C4", "C5"]
    record = constants.to_record(parse_poly("x2-x1-1"), x2)
    assert record.pivot == "x2"
    assert record.coefficients == [2]
    assert record.C5 == pytest.approx(float(constants.C5))
