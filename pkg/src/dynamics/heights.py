"""Weil heights, canonical heights and the explicit inequality constants."""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import mpmath
import sympy
from mpmath import mpf
from sympy import Poly

from src.algebra.algebraic import AlgebraicNumber, P1Point, algebraic_eval, evaluate_at, isolating_discs, root_of_unity
from src.algebra.balls import Ball
from src.algebra.polynomials import X, ZETA, coordinate_index, format_poly, univariate
from src.config import settings
from src.dynamics.local_heights import (
    archimedean_local_height,
    bad_primes,
    good_prime_part,
    padic_local_height,
    place_bounds,
)
from src.exceptions import DegreeError, IterateTooLargeError
from src.models.reports import HeightRecord, InequalityConstantsRecord, ProvenanceEntry

logger = logging.getLogger(__name__)

PointLike = Union[P1Point, AlgebraicNumber, int, sympy.Rational]


@dataclass(frozen=True)
class HeightValue:
    """A height with a certified error radius; radius is zero when exact."""

    value: mpf
    error_radius: mpf = mpf(0)
    exact: bool = False

    @classmethod
    def zero(cls) -> "HeightValue":
        return cls(mpf(0), mpf(0), True)

    @classmethod
    def infinite(cls) -> "HeightValue":
        return cls(mpf("inf"), mpf(0), True)

    @property
    def is_infinite(self) -> bool:
        return mpmath.isinf(self.value)

    @property
    def lower(self) -> mpf:
        return max(mpf(0), self.value - self.error_radius)

    @property
    def upper(self) -> mpf:
        return self.value + self.error_radius

    def __add__(self, other: "HeightValue") -> "HeightValue":
        return HeightValue(
            self.value + other.value,
            self.error_radius + other.error_radius,
            self.exact and other.exact,
        )

    def scaled(self, factor) -> "HeightValue":
        return HeightValue(self.value * factor, self.error_radius * abs(factor), self.exact)

    def to_dict(self) -> dict:
        return {"value": float(self.value), "radius": float(self.error_radius), "exact": self.exact}

    def to_record(self) -> HeightRecord:
        return HeightRecord(**self.to_dict())


def _as_point(a: PointLike) -> P1Point:
    if isinstance(a, P1Point):
        return a
    return P1Point.finite(a)


def _rational_height(q: sympy.Rational) -> mpf:
    q = sympy.Rational(q)
    with mpmath.workprec(settings.PRECISION_BITS):
        return mpmath.log(max(abs(int(q.p)), abs(int(q.q))))


def integer_min_poly(m: Poly) -> Poly:
    """Primitive integer multiple of a rational polynomial with positive leading coefficient."""
    _, integral = m.clear_denoms(convert=True)
    _, primitive = integral.primitive()
    if primitive.LC() < 0:
        primitive = -primitive
    return primitive


def weil_height(a: PointLike) -> HeightValue:
    """
    Absolute logarithmic Weil height, with h(inf) = 0.

    Irrational values use (1/D)(log|a_D| + sum log max(1, |alpha_i|)) over the
    conjugates of the minimal polynomial, so all conjugates share one value.
    """
    point = _as_point(a)
    if point.is_infinity:
        return HeightValue.zero()
    value = point.value
    q = value.rational
    if q is not None:
        return HeightValue(_rational_height(q), mpf(0), True)

    bits, discs = isolating_discs(value.min_poly, value.precision_bits)
    degree = value.degree
    with mpmath.workprec(bits):
        lead = mpmath.log(abs(int(integer_min_poly(value.min_poly).LC())))
        total = lead
        spread = mpf(0)
        for center, radius in discs:
            ball = Ball(center, radius, bits)
            lo = ball.abs_lower()
            hi = ball.abs_upper()
            low_term = mpmath.log(lo) if lo > 1 else mpf(0)
            high_term = mpmath.log(hi) if hi > 1 else mpf(0)
            total += (low_term + high_term) / 2
            spread += (high_term - low_term) / 2
        rounding = mpf(2) ** (-bits + 8) * (1 + abs(total))
        return HeightValue(total / degree, spread / degree + rounding, False)


def height_n(points: Sequence[PointLike]) -> HeightValue:
    """h_n(a_1, ..., a_n) = h(a_1) + ... + h(a_n)."""
    if not points:
        raise ValueError("height_n needs at least one coordinate")
    total = HeightValue.zero()
    for a in points:
        total = total + weil_height(a)
    return total


def _require_dynamical(f: Poly) -> int:
    univariate(f)
    d = f.degree()
    if d < 2:
        raise DegreeError(f"canonical heights need deg(f) >= 2, got {d}")
    return d


def _is_monomial(f: Poly) -> bool:
    return len(f.terms()) == 1


def height_expansion_constant(f: Poly) -> mpf:
    """
    C_f with |h(f(a)) - d*h(a)| <= C_f for every algebraic a.

    Monomials c*x^d give h(c). Otherwise C_f = max(sum of upper place bounds,
    sum of lower place bounds) over the archimedean place and the bad primes.
    """
    _require_dynamical(f)
    if _is_monomial(f):
        return _rational_height(sympy.Rational(f.LC()))
    bounds = place_bounds(f)
    return max(mpmath.fsum(b.upper for b in bounds), mpmath.fsum(b.lower for b in bounds))


def canonical_difference_constant(f: Poly) -> mpf:
    """C_4 = C_f / (d - 1), bounding |h_hat_f(a) - h(a)|."""
    d = _require_dynamical(f)
    return height_expansion_constant(f) / (d - 1)


def orbit_step(f: Poly, a: AlgebraicNumber) -> AlgebraicNumber:
    return algebraic_eval(f, a)


def _too_large(a: AlgebraicNumber) -> bool:
    bits = sum(int(abs(sympy.Rational(c).p)).bit_length() + int(sympy.Rational(c).q).bit_length() for c in a.min_poly.all_coeffs())
    return bits > settings.ORBIT_BITS_CAP


def preperiodic_structure(f: Poly, a: PointLike, cap: Optional[int] = None) -> Optional[tuple[int, int]]:
    """
    Exact cycle detection on the orbit of ``a``.

    Returns:
        (preperiod, period) when the orbit repeats within ``cap`` steps, else None.
        The search stops early once h(f^k(a)) exceeds C_4, which rules out preperiodicity.
    """
    _require_dynamical(f)
    point = _as_point(a)
    if point.is_infinity:
        return (0, 1)
    cap = cap or settings.PERIOD_CAP
    bound = canonical_difference_constant(f)

    seen: list[AlgebraicNumber] = []
    current = point.value
    for step in range(cap + 1):
        for index, previous in enumerate(seen):
            if previous == current:
                return (index, step - index)
        if weil_height(current).lower > bound:
            return None
        seen.append(current)
        if _too_large(current):
            return None
        current = orbit_step(f, current)
    return None


def tate_estimate(f: Poly, a: PointLike, m: int) -> HeightValue:
    """h(f^m(a)) / d^m with tail C_f / ((d-1) d^m), from the exact orbit."""
    d = _require_dynamical(f)
    point = _as_point(a)
    if point.is_infinity:
        return HeightValue.infinite()
    current = point.value
    for _ in range(m):
        if _too_large(current):
            raise IterateTooLargeError(f"orbit value exceeded {settings.ORBIT_BITS_CAP} bits")
        current = orbit_step(f, current)
    h = weil_height(current)
    scale = mpf(d) ** m
    tail = height_expansion_constant(f) / ((d - 1) * scale)
    return HeightValue(h.value / scale, h.error_radius / scale + tail, False)


def tate_sequence(f: Poly, a: PointLike, m: int) -> list[tuple[int, HeightValue, HeightValue]]:
    """Rows (k, h(f^k(a)), h(f^k(a))/d^k) for k = 0..m."""
    d = _require_dynamical(f)
    point = _as_point(a)
    if point.is_infinity:
        raise ValueError("the orbit of infinity is infinity")
    rows = []
    current = point.value
    for k in range(m + 1):
        h = weil_height(current)
        rows.append((k, h, h.scaled(mpf(1) / mpf(d) ** k)))
        if k < m:
            current = orbit_step(f, current)
    return rows


def _clamped(value: mpf, radius: mpf) -> HeightValue:
    return HeightValue(max(mpf(0), value), radius, False)


def _rational_canonical(f: Poly, q: sympy.Rational, target: mpf) -> HeightValue:
    primes = bad_primes(f)
    share = target / (2 * max(1, len(primes)))
    with mpmath.workprec(settings.PRECISION_BITS):
        value, radius = archimedean_local_height(f, Ball.exact(q, settings.PRECISION_BITS), target / 2)
        for p in primes:
            local, local_radius = padic_local_height(f, q, p, share)
            value += local
            radius += local_radius
        value += good_prime_part(q, primes)
    return _clamped(value, radius)


def _good_reduction_canonical(f: Poly, a: AlgebraicNumber, target: mpf) -> HeightValue:
    bits, discs = isolating_discs(a.min_poly, a.precision_bits)
    degree = a.degree
    with mpmath.workprec(bits):
        value = mpmath.log(abs(int(integer_min_poly(a.min_poly).LC())))
        radius = mpf(0)
        for center, disc_radius in discs:
            local, local_radius = archimedean_local_height(f, Ball(center, disc_radius, bits), target)
            value += local
            radius += local_radius
    return _clamped(value / degree, radius / degree)


def canonical_height(f: Poly, a: PointLike, target_error: Optional[float] = None) -> HeightValue:
    """
    Canonical height h_hat_f(a) to within ``target_error``.

    Preperiodic points give an exact zero. Rational points use the local
    decomposition; algebraic points use the archimedean local heights of their
    conjugates when f has good reduction everywhere, and the Tate quotient
    h(f^m(a))/d^m otherwise. Infinity returns the +inf sentinel.

    Raises:
        DegreeError: If deg(f) < 2
        IterateTooLargeError: If the Tate quotient cannot reach the target; carries the best estimate
    """
    d = _require_dynamical(f)
    target = mpf(target_error if target_error is not None else settings.TARGET_ERROR)
    if target <= 0:
        raise ValueError("target_error must be positive")

    point = _as_point(a)
    if point.is_infinity:
        return HeightValue.infinite()

    structure = preperiodic_structure(f, point)
    if structure is not None:
        logger.debug("Preperiodic point", extra={"preperiod": structure[0], "period": structure[1]})
        return HeightValue.zero()

    value = point.value
    q = value.rational
    if q is not None:
        result = _rational_canonical(f, q, target)
    elif not bad_primes(f):
        result = _good_reduction_canonical(f, value, target)
    else:
        result = _tate_to_target(f, value, d, target)

    if result.error_radius > target:
        raise IterateTooLargeError(
            f"canonical height of {value} reached radius {mpmath.nstr(result.error_radius, 5)} above target",
            best_estimate=result,
        )
    return result


def _tate_to_target(f: Poly, a: AlgebraicNumber, d: int, target: mpf) -> HeightValue:
    spread = height_expansion_constant(f)
    best = None
    current = a
    scale = mpf(1)
    m = 0
    while True:
        h = weil_height(current)
        estimate = HeightValue(h.value / scale, h.error_radius / scale + spread / ((d - 1) * scale), False)
        best = estimate
        if estimate.error_radius <= target:
            return _clamped(estimate.value, estimate.error_radius)
        if _too_large(current) or m >= settings.PERIOD_CAP:
            raise IterateTooLargeError(
                f"orbit of {a} grew too large before reaching the target error",
                best_estimate=_clamped(best.value, best.error_radius),
            )
        current = orbit_step(f, current)
        scale *= d
        m += 1


def polynomial_height(F: Poly) -> mpf:
    """Affine height of the coefficient vector: log max(L, |L*c_j|) with L the lcm of denominators."""
    coefficients = [sympy.Rational(c) for c in F.coeffs()]
    if not coefficients:
        return mpf(0)
    common = sympy.ilcm(*[int(c.q) for c in coefficients]) if len(coefficients) > 1 else int(coefficients[0].q)
    largest = max([common] + [abs(int(c * common)) for c in coefficients])
    with mpmath.workprec(settings.PRECISION_BITS):
        return mpmath.log(largest)


def _degrees(F: Poly) -> dict[sympy.Symbol, int]:
    return {gen: max(F.degree(gen), 0) for gen in F.gens}


def upper_height_constant(F: Poly, zeta_order: int = 1) -> mpf:
    """
    C_1 with h(F(a)) <= sum D_i h(a_i) + C_1: coefficient height plus log(#monomials).

    Over Q(zeta), with ZETA = exp(2*pi*i/zeta_order), the coefficient height is
    bounded by the sum of the Weil heights of the coefficients.
    """
    if F.is_zero:
        raise ValueError("the upper height constant needs a nonzero polynomial")
    if ZETA not in F.gens:
        with mpmath.workprec(settings.PRECISION_BITS):
            return polynomial_height(F) + mpmath.log(len(F.terms()))

    others = [gen for gen in F.gens if gen != ZETA]
    coefficients = Poly(F.as_expr(), *others).as_dict(native=False).values()
    zeta = root_of_unity(1, zeta_order)
    with mpmath.workprec(settings.PRECISION_BITS):
        total = mpf(0)
        for c in coefficients:
            if ZETA in sympy.sympify(c).free_symbols:
                total += weil_height(evaluate_at(Poly(c, ZETA, domain=sympy.QQ), [], zeta)).upper
            else:
                total += _rational_height(sympy.Rational(c))
        return total + mpmath.log(len(coefficients))


def split_by_pivot(F: Poly, pivot: sympy.Symbol) -> tuple[int, list[Poly]]:
    """Degree D in the pivot and the coefficient polynomials F_0..F_D in the other variables."""
    if pivot not in F.gens:
        raise DegreeError(f"pivot {pivot} does not occur in {format_poly(F)}")
    D = F.degree(pivot)
    if D < 1:
        raise DegreeError(f"pivot {pivot} has degree 0 in {format_poly(F)}")
    others = [g for g in F.gens if g != pivot]
    expr = F.as_expr()
    parts = []
    for i in range(D + 1):
        coefficient = sympy.expand(expr).coeff(pivot, i)
        parts.append(Poly(coefficient, *others, domain=sympy.QQ) if others else Poly(coefficient, X, domain=sympy.QQ))
    return D, parts


def lower_height_constant(F: Poly, pivot: sympy.Symbol) -> mpf:
    """
    C_2 with h(a_n) - sum 2 D_j h(a_j) - C_2 <= h(F(a)) whenever some F_i(a') != 0, i >= 1.

    For the largest such i, writing F = F_i x_n^i + Q_i gives
    C_2 = max_i [C_1(F_i) + C_1(Q_i) + 2 log 2], dropping the Q_i terms when Q_i = 0.
    """
    D, parts = split_by_pivot(F, pivot)
    expr = sympy.expand(F.as_expr())
    with mpmath.workprec(settings.PRECISION_BITS):
        best = mpf(0)
        for i in range(1, D + 1):
            if parts[i].is_zero:
                continue
            candidate = upper_height_constant(parts[i])
            remainder = sympy.expand(sum(expr.coeff(pivot, j) * pivot**j for j in range(i)))
            if remainder != 0:
                candidate += upper_height_constant(Poly(remainder, *F.gens, domain=sympy.QQ)) + 2 * mpmath.log(2)
            best = max(best, candidate)
        return best


def canonical_bound_coefficients(F: Poly, pivot: sympy.Symbol) -> dict[sympy.Symbol, int]:
    """The multipliers 2*D_j of h_hat(a_j) for the non-pivot coordinates."""
    return {gen: 2 * degree for gen, degree in _degrees(F).items() if gen != pivot}


def canonical_bound_constant(F: Poly, f: Poly, pivot: sympy.Symbol) -> mpf:
    """
    C_5 with h_hat(a_n) <= sum 2 D_j h_hat(a_j) + C_5 on F = 0 (gate satisfied).

    C_5 = C_2 + C_4 (1 + sum 2 D_j).
    """
    c2 = lower_height_constant(F, pivot)
    c4 = canonical_difference_constant(f)
    return c2 + c4 * (1 + sum(canonical_bound_coefficients(F, pivot).values()))


@dataclass(frozen=True)
class InequalityConstants:
    """C1, C2, C4, C5 for one polynomial and pivot, with their derivation."""

    C1: mpf
    C2: mpf
    C4: mpf
    C5: mpf
    coefficients: dict = field(default_factory=dict)
    provenance: tuple[ProvenanceEntry, ...] = ()

    def to_record(self, F: Poly, pivot: sympy.Symbol) -> InequalityConstantsRecord:
        return InequalityConstantsRecord(
            projection=format_poly(F),
            pivot=str(pivot),
            C1=float(self.C1),
            C2=float(self.C2),
            C4=float(self.C4),
            C5=float(self.C5),
            coefficients=[self.coefficients[g] for g in sorted(self.coefficients, key=coordinate_index)],
            provenance=list(self.provenance),
        )


def inequality_constants(F: Poly, f: Poly, pivot: sympy.Symbol) -> InequalityConstants:
    """All four constants with a provenance trail."""
    c1 = upper_height_constant(F)
    c2 = lower_height_constant(F, pivot)
    cf = height_expansion_constant(f)
    c4 = canonical_difference_constant(f)
    coefficients = canonical_bound_coefficients(F, pivot)
    c5 = c2 + c4 * (1 + sum(coefficients.values()))
    provenance = (
        ProvenanceEntry(
            constant="C1",
            formula=f"h_aff(coefficients)={float(polynomial_height(F)):.6g} + log(#monomials={len(F.terms())})",
            value=float(c1),
        ),
        ProvenanceEntry(
            constant="C2",
            formula=f"max_i [C1(F_i) + C1(Q_i) + 2 log 2] over pivot {pivot}",
            value=float(c2),
        ),
        ProvenanceEntry(constant="C_f", formula=f"max(sum U_v, sum L_v) for f={format_poly(f)}", value=float(cf)),
        ProvenanceEntry(constant="C4", formula=f"C_f/(d-1), d={f.degree()}", value=float(c4)),
        ProvenanceEntry(
            constant="C5",
            formula=f"C2 + C4*(1 + sum 2D_j), sum 2D_j={sum(coefficients.values())}; coefficient 2D_j kept (factor 2 from the lower bound)",
            value=float(c5),
        ),
    )
    return InequalityConstants(c1, c2, c4, c5, coefficients, provenance)
