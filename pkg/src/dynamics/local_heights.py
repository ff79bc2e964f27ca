"""
Local canonical heights of a polynomial map at each place of the rationals.

For a rational point the canonical height splits as the archimedean local
height, the local heights at the finitely many primes where f has bad
reduction, and a closed form over the remaining primes. Each piece carries an
explicit error radius.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
import sympy
from mpmath import mpf
from sympy import Poly

from src.algebra.balls import Ball, horner, to_mpc
from src.config import settings

logger = logging.getLogger(__name__)

ARCHIMEDEAN = 0


@dataclass(frozen=True)
class PlaceBounds:
    """Bounds |log+|f(a)|_v - d*log+|a|_v| stay within [-lower, upper] at place v (0 = archimedean)."""

    place: int
    upper: mpf
    lower: mpf

    @property
    def spread(self) -> mpf:
        return max(self.upper, self.lower)


def valuation(value, p: int) -> Optional[int]:
    """p-adic valuation of a rational, None for zero."""
    q = sympy.Rational(value)
    if q == 0:
        return None
    return sympy.multiplicity(p, q.p) - sympy.multiplicity(p, q.q)


def bad_primes(f: Poly) -> list[int]:
    """Primes dividing a coefficient denominator or the leading coefficient's numerator."""
    primes = set()
    for c in f.all_coeffs():
        q = sympy.Rational(c)
        if q != 0:
            primes.update(sympy.factorint(q.q))
    primes.update(sympy.factorint(abs(sympy.Rational(f.LC()).p)))
    primes.discard(1)
    return sorted(primes)


def _coefficients(f: Poly) -> list[sympy.Rational]:
    """a_0, ..., a_d."""
    return [sympy.Rational(c) for c in reversed(f.all_coeffs())]


def archimedean_bounds(f: Poly, bits: Optional[int] = None) -> PlaceBounds:
    d = f.degree()
    with mpmath.workprec(bits or settings.PRECISION_BITS):
        a = [abs(to_mpc(c)) for c in _coefficients(f)]
        lead = a[d]
        tail = mpmath.fsum(a[:d])
        upper = max(mpf(0), mpmath.log(mpmath.fsum(a)))
        radius = max(mpf(1), 2 * tail / lead)
        lower = max(mpf(0), d * mpmath.log(radius), -mpmath.log(lead / 2))
        return PlaceBounds(ARCHIMEDEAN, upper, lower)


def padic_bounds(f: Poly, p: int, bits: Optional[int] = None) -> PlaceBounds:
    d = f.degree()
    a = _coefficients(f)
    v = [valuation(c, p) for c in a]
    v_lead = v[d]
    worst = max(-vi for vi in v if vi is not None)
    escape = max([0] + [v_lead - vi for vi in v[:d] if vi is not None])
    with mpmath.workprec(bits or settings.PRECISION_BITS):
        log_p = mpmath.log(p)
        upper = max(0, worst) * log_p
        lower = max(0, d * escape, v_lead) * log_p
        return PlaceBounds(p, mpf(upper), mpf(lower))


def place_bounds(f: Poly, bits: Optional[int] = None) -> list[PlaceBounds]:
    """Archimedean bounds first, then one entry per bad prime."""
    return [archimedean_bounds(f, bits)] + [padic_bounds(f, p, bits) for p in bad_primes(f)]


def _steps_for(spread: mpf, d: int, target: mpf) -> int:
    if spread <= 0:
        return 0
    return max(0, int(mpmath.ceil(mpmath.log(spread / ((d - 1) * target)) / mpmath.log(d)))) + 1


def _log_plus_interval(ball: Ball) -> tuple[mpf, mpf]:
    lo = ball.abs_lower()
    hi = ball.abs_upper()
    return (mpmath.log(lo) if lo > 1 else mpf(0), mpmath.log(hi) if hi > 1 else mpf(0))


def archimedean_local_height(f: Poly, start: Ball, target: mpf) -> tuple[mpf, mpf]:
    """
    Archimedean local canonical height at a point given by a ball.

    Once the orbit is past the escape radius the closed form
    (log|z_k| + log|a_d|/(d-1)) / d^k is used with error
    2S / (|a_d| |z_k| (d-1) d^k); before that the generic tail
    spread / ((d-1) d^k) applies.

    Returns:
        (value, error radius)
    """
    d = f.degree()
    bits = start.bits
    best = (mpf(0), mpf("inf"))
    for attempt in range(settings.REFINE_ATTEMPTS + 1):
        with mpmath.workprec(bits):
            coefficients = [to_mpc(c) for c in f.all_coeffs()]
            a = [abs(c) for c in reversed(coefficients)]
            lead = a[d]
            tail = mpmath.fsum(a[:d])
            escape = max(mpf(1), 2 * tail / lead, (2 / lead) ** (mpf(1) / (d - 1)))
            spread = archimedean_bounds(f, bits).spread
            shift = mpmath.log(lead) / (d - 1)
            steps = _steps_for(spread, d, target) + 64

            z = Ball(start.center, start.radius, bits)
            scale = mpf(1)
            for k in range(steps + 1):
                low = z.abs_lower()
                if low >= escape:
                    lo, hi = mpmath.log(low), mpmath.log(z.abs_upper())
                    value = ((lo + hi) / 2 + shift) / scale
                    error = (hi - lo) / 2 / scale + 2 * tail / (lead * low * (d - 1) * scale)
                else:
                    lo, hi = _log_plus_interval(z)
                    value = (lo + hi) / 2 / scale
                    error = (hi - lo) / 2 / scale + spread / ((d - 1) * scale)
                if error < best[1]:
                    best = (value, error)
                if error <= target:
                    return value, error
                z = horner(coefficients, z)
                scale *= d
        logger.debug("Raising precision for archimedean local height", extra={"bits": bits * 2, "attempt": attempt})
        bits *= 2
    return best


def _reduce(z: Fraction, p: int, precision: int) -> Fraction:
    """A representative of z modulo p^precision with a small numerator and p-power denominator."""
    if z == 0:
        return Fraction(0)
    v = valuation(sympy.Rational(z.numerator, z.denominator), p)
    if v >= precision:
        return Fraction(0)
    modulus = p ** (precision - v)
    num = z.numerator
    den = z.denominator
    if v > 0:
        num //= p**v
    elif v < 0:
        den //= p ** (-v)
    unit = (num * pow(den, -1, modulus)) % modulus
    return Fraction(unit) * Fraction(p) ** v


def padic_local_height(f: Poly, a: sympy.Rational, p: int, target: mpf) -> tuple[mpf, mpf]:
    """
    Local canonical height at a bad prime p for a rational point.

    The orbit is followed modulo a power of p that is large enough for every
    step; once |z|_p exceeds the escape radius the closed form is exact.

    Returns:
        (value, error radius)
    """
    d = f.degree()
    coefficients = _coefficients(f)
    v = [valuation(c, p) for c in coefficients]
    v_lead = v[d]
    escape = max([Fraction(0), Fraction(v_lead, d - 1)] + [Fraction(v_lead - vi) for vi in v[:d] if vi is not None])
    worst = max([0] + [-vi for vi in v[1:] if vi is not None])
    bounds = padic_bounds(f, p)
    steps = _steps_for(bounds.spread, d, target)
    loss_cap = worst + (d - 1) * math.ceil(escape)
    precision = steps * loss_cap + 2

    fractions = [Fraction(int(c.p), int(c.q)) for c in coefficients]
    log_p = mpmath.log(p)
    z = _reduce(Fraction(int(a.p), int(a.q)), p, precision)
    for k in range(steps + 1):
        vz = valuation(sympy.Rational(z.numerator, z.denominator), p) if z != 0 else None
        known = vz is not None and vz < precision
        if known and -vz > escape:
            value = (-vz * log_p - v_lead * log_p / (d - 1)) / mpf(d) ** k
            return value, mpf(0)
        if k == steps:
            break
        effective = min(vz, precision) if vz is not None else precision
        loss = max(0, -min(vi + (i - 1) * min(0, effective) for i, vi in enumerate(v) if i >= 1 and vi is not None))
        image = sum(c * z**i for i, c in enumerate(fractions))
        precision -= loss
        z = _reduce(image, p, precision)

    vz = valuation(sympy.Rational(z.numerator, z.denominator), p) if z != 0 else None
    log_plus = max(0, -vz) * log_p if vz is not None and vz < precision else mpf(0)
    scale = mpf(d) ** steps
    return log_plus / scale, bounds.spread / ((d - 1) * scale)


def good_prime_part(a: sympy.Rational, excluded: list[int]) -> mpf:
    """Sum of log+|a|_p over primes of good reduction: log of the denominator with bad primes removed."""
    denominator = int(sympy.Rational(a).q)
    for p in excluded:
        while denominator % p == 0:
            denominator //= p
    return mpmath.log(denominator)
