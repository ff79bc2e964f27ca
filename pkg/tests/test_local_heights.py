import mpmath
import pytest
import sympy

from src.algebra.balls import Ball
from src.algebra.polynomials import parse_poly
from src.dynamics.heights import polynomial_height
from src.dynamics.local_heights import (
    archimedean_local_height,
    bad_primes,
    good_prime_part,
    padic_local_height,
    place_bounds,
    valuation,
)


def test_valuation():
    assert valuation(12, 2) == 2
    assert valuation(sympy.Rational(3, 8), 2) == -3
    assert valuation(7, 3) == 0
    assert valuation(0, 5) is None


@pytest.mark.parametrize("text,primes", [("x^2+1", []), ("x^2/2+1", [2]), ("3*x^2+1", [3]), ("x^2/6+x/5", [2, 3, 5])])
def test_bad_primes(text, primes):
    assert bad_primes(parse_poly(text)) == primes


def test_place_bounds_start_archimedean():
    bounds = place_bounds(parse_poly("x^2/2+1"))
    assert [b.place for b in bounds] == [0, 2]
    assert all(b.spread >= 0 for b in bounds)


def test_good_prime_part_drops_bad_primes():
    assert float(good_prime_part(sympy.Rational(1, 12), [2])) == pytest.approx(float(mpmath.log(3)))
    assert good_prime_part(sympy.Rational(5, 1), []) == 0


def test_archimedean_height_of_escaping_point():
    value, error = archimedean_local_height(parse_poly("x^2"), Ball.exact(3, 128), mpmath.mpf("1e-12"))
    assert error <= mpmath.mpf("1e-12")
    assert abs(value - mpmath.log(3)) <= error + mpmath.mpf("1e-30")


def test_padic_height_in_the_escape_region():
    # |1/2|_2 = 2 already escapes for x^2/2 + 1, so the closed form applies at once
    value, error = padic_local_height(parse_poly("x^2/2+1"), sympy.Rational(1, 2), 2, mpmath.mpf("1e-9"))
    assert error == 0
    assert float(value) == pytest.approx(float(2 * mpmath.log(2)))


def test_padic_height_of_integral_orbit_is_small():
    value, error = padic_local_height(parse_poly("x^2/2+1"), sympy.Integer(2), 2, mpmath.mpf("1e-6"))
    # 2 -> 3 -> 11/2 escapes with valuation -1 after two steps
    assert float(value) == pytest.approx(float(2 * mpmath.log(2) / 4), abs=float(error) + 1e-12)


def test_polynomial_height():
    assert float(polynomial_height(parse_poly("x^2/2 + 3"))) == pytest.approx(float(mpmath.log(6)))
    assert polynomial_height(parse_poly("x + 1")) == 0
