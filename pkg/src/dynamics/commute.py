"""
Polynomials commuting with an iterate of a disintegrated f.

Everything is computed in the translated coordinates h = f(x + beta) - beta,
where h has rational coefficients and the symmetries are exactly x -> mu*x.
A linear map mu*x commutes with a polynomial P iff mu^(j-1) = 1 for every j
in the support of P, so the exact composition test reduces to a gcd of
support exponents.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Optional

import sympy
from sympy import QQ, Poly

from src.algebra.algebraic import AlgebraicNumber, root_of_unity
from src.algebra.polynomials import X, ZETA, format_poly, identity, poly_iterate, reduce_mod_cyclotomic, support, univariate
from src.config import settings
from src.dynamics.classify import classify, normal_form
from src.exceptions import NotDisintegratedError

logger = logging.getLogger(__name__)

MINIMAL_COMMUTER_SEARCH = "degrees e with e^t = deg f; leading coefficients restricted to rational roots"


def _support_gcd(p: Poly) -> int:
    return reduce(math.gcd, (abs(j - 1) for j in support(p)), 0)


def _mu_expr(exponent: int, order: int) -> sympy.Expr:
    reduced = order // math.gcd(exponent, order)
    if reduced == 1:
        return sympy.Integer(1)
    if reduced == 2:
        return sympy.Integer(-1)
    return sympy.exp(2 * sympy.pi * sympy.I * sympy.Rational(exponent, order))


@dataclass(frozen=True)
class SymmetryElement:
    """L(x) = mu*(x - beta) + beta with mu = exp(2*pi*i*exponent/group_order)."""

    exponent: int
    group_order: int
    witness: int
    beta: sympy.Rational

    @property
    def order(self) -> int:
        return self.group_order // math.gcd(self.exponent, self.group_order)

    @property
    def is_rational(self) -> bool:
        return self.order <= 2

    @property
    def mu(self) -> AlgebraicNumber:
        return root_of_unity(self.exponent, self.group_order)

    def expr(self) -> sympy.Expr:
        return _mu_expr(self.exponent, self.group_order) * (X - self.beta) + self.beta

    def zeta_expr(self) -> sympy.Expr:
        """L with mu written as ZETA**exponent, ZETA a primitive group_order-th root of unity."""
        return ZETA ** (self.exponent % self.group_order) * (X - self.beta) + self.beta

    def poly(self) -> Optional[Poly]:
        if not self.is_rational:
            return None
        return Poly(self.expr(), X, domain=QQ)

    def text(self) -> str:
        return sympy.sstr(sympy.expand(self.expr())).replace("**", "^")

    def to_dict(self) -> dict:
        return {
            "L": self.text(),
            "mu": self.mu.to_dict(),
            "order": self.order,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class SymmetryGroup:
    """The cyclic group of linear maps commuting with some iterate of f."""

    order: int
    elements: tuple[SymmetryElement, ...]
    beta: sympy.Rational
    k_max: int
    gap: int

    @property
    def generators(self) -> list[SymmetryElement]:
        return [e for e in self.elements if e.exponent == 1] or [self.elements[0]]

    def element(self, exponent: int) -> SymmetryElement:
        return self.elements[exponent % self.order]

    def compose(self, a: SymmetryElement, b: SymmetryElement) -> SymmetryElement:
        """a o b, which is mu_a * mu_b on the translated line."""
        return self.element(a.exponent + b.exponent)

    def inverse(self, a: SymmetryElement) -> SymmetryElement:
        return self.element(-a.exponent)

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "k_max": self.k_max,
            "elements": [e.to_dict() for e in self.elements],
        }


def _require_disintegrated(f: Poly) -> None:
    label = classify(f)
    if not label.is_disintegrated:
        raise NotDisintegratedError("symmetry group contract requires disintegrated f", label.label)


def default_k_max(f: Poly) -> int:
    """Configured K_MAX, else gap * d."""
    if settings.K_MAX:
        return settings.K_MAX
    nf = normal_form(f)
    return (nf.gap or 1) * nf.degree


def _translated_iterates(h: Poly, k_max: int) -> list[Poly]:
    """h^1..h^k for k up to k_max, stopping at the iterate degree cap."""
    iterates = []
    current = h
    for _ in range(k_max):
        if current.degree() > settings.ITERATE_DEGREE_CAP:
            break
        iterates.append(current)
        current = h.compose(current)
    return iterates


def symmetry_group(f: Poly, k_max: Optional[int] = None) -> SymmetryGroup:
    """
    M(f^inf) up to iterate k_max, each element with the smallest witnessed k.

    Raises:
        NotDisintegratedError: If f is conjugate to a power map or a Chebyshev polynomial
    """
    univariate(f)
    _require_disintegrated(f)
    nf = normal_form(f)
    r = nf.gap
    k_max = k_max or default_k_max(f)

    gcds: dict[int, int] = {}
    for k, iterate in enumerate(_translated_iterates(nf.shifted, k_max), start=1):
        gcds[k] = math.gcd(_support_gcd(iterate), r)
        if gcds[k] == r:
            break
    order = reduce(lambda a, b: a * b // math.gcd(a, b), gcds.values(), 1)

    def witness_for(element_order: int) -> int:
        for k, s in gcds.items():
            if s % element_order == 0:
                return k
        parts = []
        for prime, power in sympy.factorint(element_order).items():
            parts.append(next(k for k, s in gcds.items() if s % prime**power == 0))
        return reduce(lambda a, b: a * b // math.gcd(a, b), parts, 1)

    elements = tuple(
        SymmetryElement(j, order, witness_for(order // math.gcd(j, order)), nf.beta) for j in range(order)
    )
    logger.info("Symmetry group computed", extra={"f": format_poly(f), "order": order, "k_searched": len(gcds)})
    return SymmetryGroup(order, elements, nf.beta, k_max, r)


def _rational_power_roots(n: int, value: sympy.Rational) -> list[sympy.Rational]:
    """Rational c with c^n = value, positive first."""
    value = sympy.Rational(value)
    if value == 0:
        return [sympy.Integer(0)]
    num, num_exact = sympy.integer_nthroot(abs(int(value.p)), n)
    den, den_exact = sympy.integer_nthroot(int(value.q), n)
    if not (num_exact and den_exact):
        return []
    root = sympy.Rational(num, den)
    if value > 0:
        return [root, -root] if n % 2 == 0 else [root]
    return [-root] if n % 2 == 1 else []


def _solve_commuter(F: Poly, e: int) -> Optional[Poly]:
    """A degree-e polynomial g with g o F = F o g, by triangular back-substitution from the top."""
    D = F.degree()
    lead_F = sympy.Rational(F.LC())
    for c in _rational_power_roots(D - 1, lead_F ** (e - 1)):
        coefficients = {e: c}
        slope = D * lead_F * c ** (D - 1)
        for m in range(1, e + 1):
            g0 = Poly(sum(v * X**i for i, v in coefficients.items()), X, domain=QQ)
            difference = F.compose(g0) - g0.compose(F)
            offset = sympy.Rational(difference.coeff_monomial(X ** (e * D - m)))
            coefficients[e - m] = -offset / slope
        g = Poly(sum(v * X**i for i, v in coefficients.items()), X, domain=QQ)
        if g.compose(F) == F.compose(g):
            return g
    return None


def _proper_roots(d: int) -> list[int]:
    """Degrees e >= 2 with e^t = d for some t >= 2, ascending."""
    roots = []
    for t in range(2, d.bit_length() + 1):
        e, exact = sympy.integer_nthroot(d, t)
        if exact and e >= 2:
            roots.append(int(e))
    return sorted(set(roots))


def minimal_commuter_with_witness(f: Poly, k_max: Optional[int] = None) -> tuple[Poly, int]:
    """The minimal-degree commuter f~ and the iterate it was found against."""
    univariate(f)
    _require_disintegrated(f)
    nf = normal_form(f)
    k_max = k_max or default_k_max(f)
    iterates = _translated_iterates(nf.shifted, k_max)

    for e in _proper_roots(nf.degree):
        for k, F in enumerate(iterates, start=1):
            g = _solve_commuter(F, e)
            if g is not None:
                original = Poly(g.as_expr().subs(X, X - nf.beta) + nf.beta, X, domain=QQ)
                logger.info("Minimal commuter found", extra={"f": format_poly(f), "degree": e, "witness": k})
                return original, k
    return f.set_domain(QQ) if f.domain.is_ZZ else f, 1


def minimal_commuter(f: Poly, k_max: Optional[int] = None) -> Poly:
    """
    The minimal-degree polynomial f~ (degree >= 2) commuting with an iterate of f.

    Only degrees e with e^t = deg(f) are searched, and only rational leading
    coefficients; a minimal commuter whose leading coefficient is irrational is
    missed. f itself is returned when no searched degree admits a solution.
    """
    return minimal_commuter_with_witness(f, k_max)[0]


def d_exponent(base: Poly, group: SymmetryGroup) -> int:
    """D_f with f~ o L = L^D o f~ for L in the group; coprime to the group order."""
    if group.order == 1:
        return 1
    translated = Poly(base.as_expr().subs(X, X + group.beta) - group.beta, X, domain=QQ)
    exponent = translated.degree() % group.order
    residues = {j % group.order for j in support(translated)}
    if residues != {exponent} or math.gcd(exponent, group.order) != 1:
        logger.warning(
            "Minimal commuter support is not uniform modulo the group order",
            extra={"base": format_poly(base), "order": group.order},
        )
    return exponent


def commutes_over_zeta(g: sympy.Expr, F: Poly, order: int) -> bool:
    """g o F == F o g in Q(zeta)[x], with g an expression in X and ZETA."""
    inner = F.as_expr()
    difference = g.subs(X, inner) - inner.subs(X, g)
    return reduce_mod_cyclotomic(difference, order) == 0


def is_commuter(g: Poly, f: Poly, k_max: Optional[int] = None, zeta_order: Optional[int] = None) -> Optional[int]:
    """
    Smallest k <= k_max with g o f^k = f^k o g, verified by exact composition.

    With ``zeta_order`` set, g may have coefficients in Q(zeta) written as a
    polynomial in X and ZETA, and the identity is checked modulo Phi_zeta_order.
    """
    if zeta_order is None:
        univariate(g)
    k_max = k_max or default_k_max(f)
    current = f
    for k in range(1, k_max + 1):
        if current.degree() * max(g.degree(), 1) > settings.ITERATE_DEGREE_CAP * 4:
            return None
        if zeta_order is None:
            if g.compose(current) == current.compose(g):
                return k
        elif commutes_over_zeta(g.as_expr(), current, zeta_order):
            return k
        current = f.compose(current)
    return None


@dataclass(frozen=True)
class Commuter:
    """
    g = f~^m o L with an exact witness k: g o f^k = f^k o g.

    Rational commuters carry ``poly``. When mu is irrational, ``zeta_form`` holds g
    as a polynomial in X and ZETA reduced modulo Phi_zeta_order, with ZETA the
    primitive root exp(2*pi*i/zeta_order).
    """

    power: int
    element: SymmetryElement
    degree: int
    witness: int
    expr: sympy.Expr
    poly: Optional[Poly] = None
    verified_by: str = "composition"
    zeta_form: Optional[sympy.Expr] = None
    zeta_order: int = 1

    @property
    def is_linear(self) -> bool:
        return self.degree == 1

    @property
    def is_rational(self) -> bool:
        return self.poly is not None

    def zeta_poly(self) -> Poly:
        """g in X and ZETA; the rational commuters come back over QQ in X alone."""
        if self.poly is not None:
            return self.poly
        return Poly(self.zeta_form, X, ZETA, domain=QQ)

    def text(self) -> str:
        if self.poly is not None:
            return format_poly(self.poly)
        return sympy.sstr(self.expr).replace("**", "^")

    def to_dict(self) -> dict:
        data = {
            "g": self.text(),
            "degree": self.degree,
            "power": self.power,
            "L": self.element.text(),
            "witness": self.witness,
            "verified_by": self.verified_by,
        }
        if self.zeta_form is not None:
            data["g_zeta"] = sympy.sstr(self.zeta_form).replace("**", "^")
            data["zeta"] = f"exp(2*pi*I/{self.zeta_order})"
        return data


@dataclass(frozen=True)
class CommuterSet:
    """All commuters of iterates of f: {f~^m o L : m >= 0, L in M(f^inf)}."""

    f: Poly
    base: Poly
    base_witness: int
    group: SymmetryGroup
    D_exponent: int
    k_max: int
    cache: dict = field(default_factory=dict, compare=False, hash=False)

    def elements_up_to(self, D: int) -> list[Commuter]:
        if D not in self.cache:
            self.cache[D] = _enumerate(self, D)
        return self.cache[D]

    def to_dict(self, D: Optional[int] = None) -> dict:
        data = {
            "f": format_poly(self.f),
            "minimal_commuter": format_poly(self.base),
            "minimal_commuter_witness": self.base_witness,
            "minimal_commuter_search": MINIMAL_COMMUTER_SEARCH,
            "D_exponent": self.D_exponent,
            "group": self.group.to_dict(),
        }
        if D is not None:
            data["commuters"] = [c.to_dict() for c in self.elements_up_to(D)]
        return data


def commuter_set(f: Poly, k_max: Optional[int] = None) -> CommuterSet:
    univariate(f)
    k_max = k_max or default_k_max(f)
    group = symmetry_group(f, k_max)
    base, witness = minimal_commuter_with_witness(f, k_max)
    return CommuterSet(f, base, witness, group, d_exponent(base, group), k_max)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _enumerate(commuters: CommuterSet, D: int) -> list[Commuter]:
    f = commuters.f
    order = commuters.group.order
    d_base = commuters.base.degree()
    found = []
    m = 0
    while d_base**m <= D:
        base_power = poly_iterate(commuters.base, m) if m else identity()
        for element in commuters.group.elements:
            witness = _lcm(commuters.base_witness if m else 1, element.witness)
            expr = sympy.expand(base_power.as_expr().subs(X, element.expr()))
            if element.is_rational:
                poly, zeta_form = Poly(expr, X, domain=QQ), None
            else:
                poly = None
                zeta_form = reduce_mod_cyclotomic(base_power.as_expr().subs(X, element.zeta_expr()), order)

            if d_base**m * f.degree() ** witness > settings.ITERATE_DEGREE_CAP:
                verified_by = "unverified"
                logger.debug("Commuter above the iterate cap left unverified", extra={"g": str(expr), "k": witness})
            else:
                iterate = poly_iterate(f, witness)
                if poly is not None:
                    holds = poly.compose(iterate) == iterate.compose(poly)
                    verified_by = "composition"
                else:
                    holds = commutes_over_zeta(zeta_form, iterate, order)
                    verified_by = f"composition mod cyclotomic({order})"
                if not holds:
                    logger.warning("Commuter failed its witness check", extra={"g": str(expr), "k": witness})
                    continue
            found.append(Commuter(m, element, d_base**m, witness, expr, poly, verified_by, zeta_form, order))
        m += 1
        if d_base**m > D:
            break
    return sorted(found, key=lambda c: (c.degree, c.element.exponent))


def commuters_up_to(f: Poly, D: int, k_max: Optional[int] = None) -> list[Commuter]:
    """
    Every polynomial of degree <= D commuting with an iterate of f, each with its witness.

    Raises:
        NotDisintegratedError: If f is not disintegrated
    """
    if D < 1:
        raise ValueError("degree bound D must be at least 1")
    return commuter_set(f, k_max).elements_up_to(D)
