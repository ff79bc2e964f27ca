"""
Algebraic numbers as a minimal polynomial plus an isolating complex disc.

Root discs come from mpmath's simultaneous root finder and are certified with
the Weierstrass correction bound: with approximations z_1..z_n of the roots of
a degree-n polynomial p, every disc D(z_i, n|p(z_i)| / |lc(p) prod_{j!=i}(z_i - z_j)|)
contains a root, and pairwise disjoint discs contain exactly one root each.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import mpmath
import sympy
from mpmath import mpc, mpf
from sympy import QQ, Poly

from src.algebra.balls import Ball, horner, to_mpc
from src.algebra.polynomials import X, ZETA, coordinate_index, format_poly, parse_poly, univariate
from src.config import settings
from src.exceptions import PolynomialParseError, PrecisionExhaustedError

logger = logging.getLogger(__name__)

Y = sympy.Symbol("y")
RationalLike = Union[int, sympy.Rational]

_INFINITY_TOKENS = {"inf", "infinity", "oo", "∞"}


def _disc_key(disc: tuple[mpc, mpf]) -> tuple:
    return (float(disc[0].real), float(disc[0].imag))


def _weierstrass_discs(coefficients: list[mpc], roots: list[mpc], bits: int) -> Optional[list[tuple[mpc, mpf]]]:
    """Certified discs around root approximations, or None if they are not disjoint."""
    n = len(roots)
    lead = abs(coefficients[0])
    slack = 1 + mpf(2) ** (-bits // 2)
    discs = []
    for i, z in enumerate(roots):
        denominator = lead
        for j, w in enumerate(roots):
            if i != j:
                denominator *= abs(z - w)
        if denominator == 0:
            return None
        value = horner(coefficients, Ball(z, mpf(0), bits)).abs_upper()
        radius = n * value / denominator * slack + mpf(2) ** (-bits) * (1 + abs(z))
        discs.append((z, radius))

    for i in range(n):
        for j in range(i + 1, n):
            if abs(discs[i][0] - discs[j][0]) <= discs[i][1] + discs[j][1]:
                return None
    return discs


@lru_cache(maxsize=2048)
def isolating_discs(m: Poly, bits: int) -> tuple[int, tuple[tuple[mpc, mpf], ...]]:
    """
    Isolate every root of an irreducible polynomial.

    Returns:
        (bits actually used, discs sorted by real then imaginary part)

    Raises:
        PrecisionExhaustedError: If the discs stay overlapping after all refinements
    """
    coefficients_q = m.all_coeffs()
    degree = m.degree()
    b = bits
    for _ in range(settings.REFINE_ATTEMPTS + 1):
        with mpmath.workprec(b):
            coefficients = [to_mpc(c) for c in coefficients_q]
            if degree == 1:
                ball = Ball.exact(-sympy.Rational(coefficients_q[1]) / sympy.Rational(coefficients_q[0]), b)
                return b, ((ball.center, ball.radius),)
            try:
                roots = mpmath.polyroots(coefficients, maxsteps=100 + 20 * degree, extraprec=max(32, b // 2), cleanup=True)
            except mpmath.mp.NoConvergence:
                roots = None
            if roots is not None:
                discs = _weierstrass_discs(coefficients, [mpc(z) for z in roots], b)
                if discs is not None:
                    return b, tuple(sorted(discs, key=_disc_key))
        logger.debug("Refining root isolation", extra={"minpoly": format_poly(m), "bits": b * 2})
        b *= 2
    raise PrecisionExhaustedError(f"could not isolate the roots of {format_poly(m)} with {b // 2} bits")


@dataclass(frozen=True, eq=False)
class AlgebraicNumber:
    """An algebraic number: its monic minimal polynomial and a disc isolating it among the conjugates."""

    min_poly: Poly
    center: mpc
    radius: mpf
    precision_bits: int

    @classmethod
    def from_rational(cls, value: RationalLike, bits: Optional[int] = None) -> "AlgebraicNumber":
        q = sympy.Rational(value)
        ball = Ball.exact(q, bits or settings.PRECISION_BITS)
        return cls(Poly(X - q, X, domain=QQ), ball.center, ball.radius, ball.bits)

    @property
    def degree(self) -> int:
        return self.min_poly.degree()

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    @property
    def rational(self) -> Optional[sympy.Rational]:
        """The exact value when rational, else None."""
        if not self.is_rational:
            return None
        return -sympy.Rational(self.min_poly.all_coeffs()[1])

    def is_zero(self) -> bool:
        return self.rational == 0

    def ball(self) -> Ball:
        return Ball(self.center, self.radius, self.precision_bits)

    def refine(self, bits: int) -> "AlgebraicNumber":
        """Same number with a disc computed at no fewer than ``bits`` bits."""
        if bits <= self.precision_bits:
            return self
        q = self.rational
        if q is not None:
            return AlgebraicNumber.from_rational(q, bits)
        used, index = self._designate(bits)
        center, radius = isolating_discs(self.min_poly, used)[1][index]
        return AlgebraicNumber(self.min_poly, center, radius, used)

    def _designate(self, bits: int) -> tuple[int, int]:
        """Index of this number among the discs of an isolation run at ``bits`` or more."""
        own = self.ball()
        b = bits
        for _ in range(settings.REFINE_ATTEMPTS + 1):
            used, discs = isolating_discs(self.min_poly, b)
            hits = [i for i, (c, r) in enumerate(discs) if own.overlaps(Ball(c, r, used))]
            if len(hits) == 1:
                return used, hits[0]
            if not hits:
                raise PrecisionExhaustedError(f"disc around {mpmath.nstr(self.center, 10)} lost its root")
            b = used * 2
        raise PrecisionExhaustedError(f"cannot designate a root of {format_poly(self.min_poly)}")

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, sympy.Rational)):
            other = AlgebraicNumber.from_rational(other)
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        if self.min_poly != other.min_poly:
            return False
        if self.is_rational:
            return True
        if not self.ball().overlaps(other.ball()):
            return False
        bits = max(self.precision_bits, other.precision_bits)
        while True:
            used_a, index_a = self._designate(bits)
            used_b, index_b = other._designate(used_a)
            if used_a == used_b:
                return index_a == index_b
            bits = max(used_a, used_b)

    def __hash__(self) -> int:
        return hash(self.min_poly)

    def __str__(self) -> str:
        q = self.rational
        if q is not None:
            return str(q)
        return f"root of {format_poly(self.min_poly)} near {mpmath.nstr(self.center, 12)}"

    __repr__ = __str__

    def to_dict(self) -> dict:
        """JSON form: ``{minpoly, approx: [re, im], radius}``."""
        return {
            "minpoly": format_poly(self.min_poly),
            "approx": [float(self.center.real), float(self.center.imag)],
            "radius": float(self.radius),
        }


@dataclass(frozen=True)
class P1Point:
    """A point of the projective line: a finite algebraic number or infinity."""

    value: Optional[AlgebraicNumber] = None

    @classmethod
    def infinity(cls) -> "P1Point":
        return cls(None)

    @classmethod
    def finite(cls, value: Union[AlgebraicNumber, RationalLike]) -> "P1Point":
        if not isinstance(value, AlgebraicNumber):
            value = AlgebraicNumber.from_rational(value)
        return cls(value)

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def __str__(self) -> str:
        return "∞" if self.value is None else str(self.value)

    def to_dict(self) -> dict:
        if self.value is None:
            return {"infinity": True}
        return self.value.to_dict()


def isolate_roots(p: Poly, precision_bits: Optional[int] = None) -> list[AlgebraicNumber]:
    """
    All complex roots of ``p`` with multiplicity, each tagged with its irreducible factor.

    Raises:
        ValueError: On the zero polynomial
    """
    univariate(p)
    if p.is_zero:
        raise ValueError("cannot isolate roots of the zero polynomial")
    bits = precision_bits or settings.PRECISION_BITS

    roots = []
    for factor, multiplicity in p.factor_list()[1]:
        m = factor.monic()
        if m.degree() == 1:
            root = AlgebraicNumber.from_rational(-sympy.Rational(m.all_coeffs()[1]), bits)
            roots.extend([root] * multiplicity)
            continue
        used, discs = isolating_discs(m, bits)
        for center, radius in discs:
            roots.extend([AlgebraicNumber(m, center, radius, used)] * multiplicity)
    return sorted(roots, key=lambda a: (a.degree, float(a.center.real), float(a.center.imag)))


def distinct_roots(p: Poly, precision_bits: Optional[int] = None) -> list[AlgebraicNumber]:
    """Roots of ``p`` without multiplicity."""
    seen: list[AlgebraicNumber] = []
    for root in isolate_roots(p, precision_bits):
        if not seen or not (seen[-1].min_poly == root.min_poly and seen[-1].center == root.center):
            seen.append(root)
    return seen


def root_of_unity(exponent: int, order: int, bits: Optional[int] = None) -> AlgebraicNumber:
    """exp(2*pi*i*exponent/order) as an algebraic number."""
    reduced = order // math.gcd(exponent, order)
    if reduced == 1:
        return AlgebraicNumber.from_rational(1, bits)
    if reduced == 2:
        return AlgebraicNumber.from_rational(-1, bits)
    cyclotomic = Poly(sympy.cyclotomic_poly(reduced, X), X, domain=QQ)
    wanted = mpmath.expjpi(mpmath.mpf(2 * exponent) / order)
    return min(distinct_roots(cyclotomic, bits), key=lambda a: abs(a.center - wanted))


def _select_root(resultant: Poly, target: Callable[[int], Ball], bits: int) -> AlgebraicNumber:
    """Pick the unique root of ``resultant`` inside the ball ``target(bits)``, refining as needed."""
    factors = [f.monic() for f, _ in resultant.factor_list()[1]]
    b = bits
    for _ in range(settings.REFINE_ATTEMPTS + 1):
        ball = target(b)
        hits = []
        for m in factors:
            if m.degree() == 1:
                q = -sympy.Rational(m.all_coeffs()[1])
                if ball.overlaps(Ball.exact(q, b)):
                    hits.append(AlgebraicNumber.from_rational(q, b))
                continue
            used, discs = isolating_discs(m, b)
            for center, radius in discs:
                if ball.overlaps(Ball(center, radius, used)):
                    hits.append(AlgebraicNumber(m, center, radius, used))
        if len(hits) == 1:
            return hits[0]
        b *= 2
    raise PrecisionExhaustedError(f"root designation failed for {format_poly(resultant)}")


def _rational_eval(p: Poly, q: sympy.Rational) -> sympy.Rational:
    return sympy.Rational(p.eval(q))


def algebraic_eval(p: Poly, a: AlgebraicNumber) -> AlgebraicNumber:
    """
    Exact value p(a).

    The minimal polynomial of the result is a factor of Res_y(m_a(y), x - p(y));
    the right root is the one inside the ball evaluation of p at a's disc.
    """
    univariate(p)
    q = a.rational
    if q is not None:
        return AlgebraicNumber.from_rational(_rational_eval(p, q), a.precision_bits)
    if p.degree() <= 0:
        return AlgebraicNumber.from_rational(p.LC() if not p.is_zero else 0, a.precision_bits)

    expr = X - p.as_expr().subs(p.gen, Y)
    resultant = Poly(sympy.resultant(a.min_poly.as_expr().subs(X, Y), expr, Y), X, domain=QQ)
    coefficients = p.all_coeffs()

    def target(bits: int) -> Ball:
        return horner(coefficients, a.refine(bits).ball())

    return _select_root(resultant, target, a.precision_bits)


def _scaled(op: str, q: sympy.Rational) -> Poly:
    if op == "+":
        return Poly(X + q, X, domain=QQ)
    if op == "-":
        return Poly(X - q, X, domain=QQ)
    if op == "*":
        return Poly(q * X, X, domain=QQ)
    return Poly(X / q, X, domain=QQ)


def algebraic_combine(a: AlgebraicNumber, b: AlgebraicNumber, op: str) -> AlgebraicNumber:
    """
    Exact a op b for op in ``+ - * /``.

    Raises:
        ZeroDivisionError: When dividing by zero
        ValueError: On an unknown operator
    """
    if op not in ("+", "-", "*", "/"):
        raise ValueError(f"unknown operator {op!r}")
    if op == "/" and b.is_zero():
        raise ZeroDivisionError("division by the algebraic number 0")

    bits = max(a.precision_bits, b.precision_bits)
    qa, qb = a.rational, b.rational
    if qa is not None and qb is not None:
        value = {"+": qa + qb, "-": qa - qb, "*": qa * qb, "/": qa / qb if qb else 0}[op]
        return AlgebraicNumber.from_rational(value, bits)
    if qb is not None:
        if op == "*" and qb == 0:
            return AlgebraicNumber.from_rational(0, bits)
        return algebraic_eval(_scaled(op, qb), a)
    if qa is not None and op in ("+", "*"):
        return algebraic_combine(b, a, op)
    if qa is not None and op == "-":
        return algebraic_eval(Poly(qa - X, X, domain=QQ), b)
    if qa == 0:
        return AlgebraicNumber.from_rational(0, bits)

    ma = a.min_poly.as_expr().subs(X, Y)
    mb = b.min_poly
    db = mb.degree()
    if op == "+":
        other = mb.as_expr().subs(X, X - Y)
    elif op == "-":
        other = mb.as_expr().subs(X, Y - X)
    elif op == "*":
        other = sympy.expand(Y**db * mb.as_expr().subs(X, X / Y))
    else:
        other = sympy.expand(X**db * mb.as_expr().subs(X, Y / X))
    resultant = Poly(sympy.resultant(ma, sympy.expand(other), Y), X, domain=QQ)

    def target(bits: int) -> Ball:
        left, right = a.refine(bits).ball(), b.refine(bits).ball()
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        return left / right

    return _select_root(resultant, target, bits)


def _coordinate_value(gen, point: Sequence[AlgebraicNumber], zeta: Optional[AlgebraicNumber]) -> AlgebraicNumber:
    if gen == ZETA:
        if zeta is None:
            raise ValueError("a value for zeta is required")
        return zeta
    return point[(coordinate_index(gen) if gen != X else 1) - 1]


def ball_eval(F: Poly, point: Sequence[AlgebraicNumber], bits: int, zeta: Optional[AlgebraicNumber] = None) -> Ball:
    """Ball enclosure of F at an algebraic point, coordinates indexed by ``x<k>``."""
    balls = {}
    for gen in F.gens:
        balls[gen] = _coordinate_value(gen, point, zeta).refine(bits).ball()
    total = Ball.exact(0, bits)
    for monom, coeff in F.terms():
        term = Ball.exact(coeff, bits)
        for gen, exponent in zip(F.gens, monom):
            for _ in range(exponent):
                term = term * balls[gen]
        total = total + term
    return total


def evaluate_at(F: Poly, point: Sequence[AlgebraicNumber], zeta: Optional[AlgebraicNumber] = None) -> AlgebraicNumber:
    """
    Exact value of a multivariate polynomial at an algebraic point.

    Rational coordinates are substituted exactly; the remaining ones are
    folded in by Horner's scheme over :func:`algebraic_combine`. A ``ZETA`` generator
    takes the value ``zeta``.
    """
    bits = max((a.precision_bits for a in point), default=settings.PRECISION_BITS)
    substitutions = {}
    remaining = []
    for gen in F.gens:
        value = _coordinate_value(gen, point, zeta)
        if value.rational is not None:
            substitutions[gen] = value.rational
        else:
            remaining.append((gen, value))

    expr = F.as_expr().subs(substitutions) if substitutions else F.as_expr()
    if not remaining:
        return AlgebraicNumber.from_rational(sympy.Rational(expr), bits)
    return _horner_algebraic(sympy.expand(expr), remaining, bits)


def _horner_algebraic(expr, remaining: list[tuple[sympy.Symbol, AlgebraicNumber]], bits: int) -> AlgebraicNumber:
    gen, value = remaining[0]
    rest = remaining[1:]
    if not rest:
        return algebraic_eval(Poly(sympy.sympify(expr).subs(gen, X), X, domain=QQ), value)

    accumulator = AlgebraicNumber.from_rational(0, bits)
    for coefficient in Poly(expr, gen).all_coeffs():
        inner = _horner_algebraic(sympy.expand(coefficient), rest, bits)
        accumulator = algebraic_combine(algebraic_combine(accumulator, value, "*"), inner, "+")
    return accumulator


def vanishes_at(F: Poly, point: Sequence[AlgebraicNumber], zeta: Optional[AlgebraicNumber] = None) -> bool:
    """Exact zero test F(point) == 0, with a ball fast path for nonzero values."""
    bits = max((a.precision_bits for a in point), default=settings.PRECISION_BITS)
    if not ball_eval(F, point, bits, zeta).contains_zero():
        return False
    return evaluate_at(F, point, zeta).is_zero()


def parse_point(text: str, precision_bits: Optional[int] = None) -> P1Point:
    """
    Parse a point of the projective line.

    Accepted forms: ``inf``, a rational (``3/2``), or a minimal polynomial with
    an optional approximation selecting the root (``x^2-2@1.41``, ``x^2+1@0,1``).
    The first root in (real, imaginary) order is used when no approximation is given.
    """
    cleaned = text.strip()
    if cleaned.lower() in _INFINITY_TOKENS:
        return P1Point.infinity()

    if "x" in cleaned:
        poly_text, _, approx_text = cleaned.partition("@")
        p = parse_poly(poly_text)
        roots = distinct_roots(p, precision_bits)
        if not roots:
            raise PolynomialParseError(text, "polynomial has no roots", 1, 0)
        if not approx_text:
            return P1Point(roots[0])
        try:
            parts = [float(part) for part in approx_text.split(",")]
        except ValueError as e:
            raise PolynomialParseError(text, f"bad approximation {approx_text!r}", 1, len(poly_text) + 2) from e
        wanted = mpc(parts[0], parts[1] if len(parts) > 1 else 0)
        return P1Point(min(roots, key=lambda a: abs(a.center - wanted)))

    try:
        value = sympy.Rational(cleaned)
    except (TypeError, ValueError, sympy.SympifyError) as e:
        raise PolynomialParseError(text, "expected a rational, a minimal polynomial or inf", 1, 0) from e
    return P1Point.finite(AlgebraicNumber.from_rational(value, precision_bits))
