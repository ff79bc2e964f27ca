"""Linear-conjugation normal form and the power / Chebyshev / disintegrated classification."""
import logging
from dataclasses import dataclass
from typing import Optional

import sympy
from sympy import QQ, Poly

from src.algebra.polynomials import X, format_poly, univariate
from src.exceptions import DegreeError
from src.models.reports import ClassKind

logger = logging.getLogger(__name__)

T = sympy.Symbol("t")


def chebyshev(d: int) -> Poly:
    """C_d with C_d(x + 1/x) = x^d + 1/x^d, from C_{k+1} = x C_k - C_{k-1}."""
    if d < 1:
        raise ValueError("Chebyshev polynomials are defined for d >= 1")
    previous = Poly(2, X, domain=QQ)  # C_0
    current = Poly(X, X, domain=QQ)
    for _ in range(d - 1):
        previous, current = current, Poly(X, X, domain=QQ) * current - previous
    return current


@dataclass(frozen=True)
class NormalForm:
    """
    g = L^{-1} o f o L with L(x) = alpha*x + beta, g monic with no x^{d-1} term.

    ``shifted`` is f(x + beta) - beta, which has rational coefficients and
    differs from g only by the scaling x -> alpha*x. ``gap`` is r with leading
    non-power term x^{d-r}, or None for the pure power x^d.
    """

    f: Poly
    g: Poly
    alpha: sympy.Expr
    beta: sympy.Rational
    gap: Optional[int]
    shifted: Poly

    @property
    def is_pure_power(self) -> bool:
        return self.gap is None

    @property
    def degree(self) -> int:
        return self.f.degree()

    def conjugator_text(self) -> str:
        return f"L(x) = {sympy.sstr(self.alpha)}*x + {sympy.sstr(self.beta)}"

    def to_dict(self) -> dict:
        return {
            "g": sympy.sstr(self.g.as_expr(), order="lex").replace("**", "^"),
            "alpha": sympy.sstr(self.alpha),
            "beta": sympy.sstr(self.beta),
            "gap": self.gap if self.gap is not None else "pure power",
        }


def _principal_alpha(lead: sympy.Rational, d: int) -> sympy.Expr:
    """alpha with alpha^(d-1) = 1/lead: the real root when one exists, else the principal complex root."""
    target = 1 / lead
    if d - 1 == 1:
        return target
    if target > 0 or (d - 1) % 2 == 1:
        return sympy.real_root(target, d - 1)
    return sympy.root(target, d - 1)


def _shift(f: Poly, beta: sympy.Rational) -> Poly:
    return Poly(f.as_expr().subs(f.gen, X + beta), X, domain=QQ) - Poly(beta, X, domain=QQ)


def normal_form(f: Poly) -> NormalForm:
    """
    Conjugate f to monic form with vanishing x^{d-1} coefficient.

    Raises:
        DegreeError: If deg(f) < 2
    """
    univariate(f)
    d = f.degree()
    if d < 2:
        raise DegreeError(f"normal form needs deg(f) >= 2, got {d}")

    if f.domain.is_ZZ:
        f = f.set_domain(QQ)
    coefficients = f.all_coeffs()
    if f.domain != QQ:
        if coefficients[0] == 1 and sympy.simplify(coefficients[1]) == 0:
            g = Poly(f.as_expr().subs(f.gen, X), X, domain=f.domain)
            return NormalForm(f, g, sympy.Integer(1), sympy.Integer(0), _gap_of(g), g)
        raise ValueError("normal forms are computed for rational polynomials")

    lead = sympy.Rational(coefficients[0])
    beta = -sympy.Rational(coefficients[1]) / (d * lead)
    shifted = _shift(f, beta)
    alpha = _principal_alpha(lead, d)

    b = [sympy.Rational(c) for c in reversed(shifted.all_coeffs())]
    terms = [b[k] * alpha ** (k - 1) * X**k for k in range(1, d + 1)]
    expr = sympy.expand(sum(terms) + b[0] / alpha)
    if alpha.is_Rational:
        g = Poly(expr, X, domain=QQ)
    else:
        g = Poly(expr, X, domain="EX")

    support = [k for k in range(d) if b[k] != 0]
    gap = d - max(support) if support else None
    logger.debug("Normal form", extra={"f": format_poly(f), "beta": str(beta), "gap": gap})
    return NormalForm(f, g, alpha, beta, gap, shifted)


def _gap_of(g: Poly) -> Optional[int]:
    d = g.degree()
    support = [monom[0] for monom, c in g.terms() if monom[0] < d and sympy.simplify(c) != 0]
    return d - max(support) if support else None


@dataclass(frozen=True)
class ClassLabel:
    """Exactly one of power, chebyshev(sign) or disintegrated."""

    kind: ClassKind
    normal_form: NormalForm
    sign: Optional[int] = None
    scale_min_poly: Optional[Poly] = None

    @property
    def label(self) -> str:
        if self.kind == ClassKind.CHEBYSHEV:
            return f"chebyshev({'+' if self.sign > 0 else '-'})"
        return self.kind.value

    @property
    def is_disintegrated(self) -> bool:
        return self.kind == ClassKind.DISINTEGRATED

    def to_dict(self) -> dict:
        data = {
            "label": self.label,
            "conjugator": self.normal_form.conjugator_text(),
            "normal_form": self.normal_form.to_dict(),
        }
        if self.kind == ClassKind.CHEBYSHEV:
            data["sign"] = self.sign
            data["scale_minpoly"] = format_poly(Poly(self.scale_min_poly.as_expr().subs(T, X), X, domain=QQ))
        return data


def _chebyshev_scale(shifted: Poly, sign: int) -> Optional[Poly]:
    """
    The polynomial whose roots t satisfy (1/t) h(t x) = sign * C_d(x), h = f(x+beta) - beta.

    Returns the gcd of all constraints on t, or None when they are inconsistent.
    """
    d = shifted.degree()
    b = [sympy.Rational(c) for c in reversed(shifted.all_coeffs())]
    c = [sympy.Rational(v) for v in reversed(chebyshev(d).all_coeffs())]

    constraints = [Poly(b[d] * T ** (d - 1) - sign, T, domain=QQ)]
    if b[1] != sign * c[1]:
        return None
    for k in range(2, d):
        if c[k] == 0:
            if b[k] != 0:
                return None
        elif b[k] == 0:
            return None
        else:
            constraints.append(Poly(b[k] * T ** (k - 1) - sign * c[k], T, domain=QQ))
    if c[0] == 0:
        if b[0] != 0:
            return None
    else:
        constraints.append(Poly(sign * c[0] * T - b[0], T, domain=QQ))

    common = constraints[0]
    for p in constraints[1:]:
        common = common.gcd(p)
    return common if common.degree() >= 1 else None


def classify(f: Poly) -> ClassLabel:
    """
    Decide whether f is linearly conjugate to x^d, to +-C_d, or disintegrated.

    The Chebyshev test reduces the residual scalings x -> t*x to a gcd over Q[t];
    the sign +1 is preferred when both signs work.
    """
    nf = normal_form(f)
    if nf.is_pure_power:
        return ClassLabel(ClassKind.POWER, nf)
    if nf.f.domain == QQ:
        for sign in (1, -1):
            scale = _chebyshev_scale(nf.shifted, sign)
            if scale is not None:
                return ClassLabel(ClassKind.CHEBYSHEV, nf, sign, scale.monic())
    return ClassLabel(ClassKind.DISINTEGRATED, nf)


def conjugate(f: Poly, a: sympy.Rational, b: sympy.Rational) -> Poly:
    """L^{-1} o f o L for L(x) = a*x + b over the rationals."""
    if a == 0:
        raise ValueError("conjugating map must be invertible")
    inner = f.as_expr().subs(f.gen, a * X + b)
    return Poly(sympy.expand((inner - b) / a), X, domain=QQ)
