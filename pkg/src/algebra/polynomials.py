"""Dense rational polynomials: parsing, printing, composition and iteration."""
import re
from typing import Iterable, Optional, Sequence

import sympy
from sympy import QQ, Poly
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)
from sympy.polys.polyerrors import CoercionFailed, GeneratorsNeeded, PolynomialError

from src.config import settings
from src.exceptions import CompositionError, DegreeError, IterateTooLargeError, PolynomialParseError

X = sympy.Symbol("x")
# a primitive root of unity, for coefficients in Q(zeta)
ZETA = sympy.Symbol("zeta")

_TRANSFORMATIONS = standard_transformations + (implicit_multiplication_application, convert_xor)
_COORDINATE = re.compile(r"^x(\d+)$")
_UNICODE = {
    "−": "-",
    "·": "*",
    "×": "*",
    "²": "^2",
    "³": "^3",
    "⁴": "^4",
    "₀": "0",
    "₁": "1",
    "₂": "2",
    "₃": "3",
    "₄": "4",
    "₅": "5",
    "₆": "6",
    "₇": "7",
    "₈": "8",
    "₉": "9",
}


def coordinate_symbols(n: int) -> tuple[sympy.Symbol, ...]:
    """Symbols x1..xn for the affine chart of (P^1)^n."""
    return tuple(sympy.Symbol(f"x{i}") for i in range(1, n + 1))


def coordinate_index(symbol: sympy.Symbol) -> int:
    """1-based index of a coordinate symbol ``x<k>``."""
    match = _COORDINATE.match(str(symbol))
    if not match:
        raise ValueError(f"not a coordinate symbol: {symbol}")
    return int(match.group(1))


def _normalize_text(text: str) -> str:
    for source, target in _UNICODE.items():
        text = text.replace(source, target)
    return text.strip()


def parse_poly(
    text: str,
    gens: Optional[Sequence[sympy.Symbol]] = None,
    line: int = 1,
) -> Poly:
    """
    Parse the plain-text polynomial format (``x^4 + 2*x^2 + 2``).

    Args:
        text: Polynomial text; ``^`` is power and ``*`` is optional
        gens: Generators to use; inferred from the text when omitted
        line: Line number reported in parse errors

    Returns:
        A sympy Poly over QQ

    Raises:
        PolynomialParseError: If the text is not a polynomial with rational coefficients
    """
    cleaned = _normalize_text(text)
    if not cleaned:
        raise PolynomialParseError(text, "empty polynomial", line, 0)

    local_dict = {"x": X}
    local_dict.update({f"x{i}": sympy.Symbol(f"x{i}") for i in range(1, 33)})
    try:
        expr = parse_expr(cleaned, local_dict=local_dict, transformations=_TRANSFORMATIONS)
    except SyntaxError as e:
        raise PolynomialParseError(text, e.msg or "syntax error", line, e.offset or 0) from e
    except Exception as e:  # tokenizer errors carry no stable type across versions
        column = getattr(e, "offset", None) or 0
        raise PolynomialParseError(text, str(e), line, column) from e

    unknown = [s for s in expr.free_symbols if s != X and not _COORDINATE.match(str(s))]
    if unknown:
        names = ", ".join(sorted(str(s) for s in unknown))
        column = cleaned.find(str(unknown[0])) + 1
        raise PolynomialParseError(text, f"unknown variable(s) {names}", line, column)

    if gens is None:
        symbols = sorted(expr.free_symbols, key=lambda s: (s != X, str(s) if s == X else coordinate_index(s)))
        if any(s != X for s in symbols) and X in symbols:
            raise PolynomialParseError(text, "mixes x with indexed coordinates", line, 0)
        gens = tuple(symbols) or (X,)

    try:
        return Poly(expr, *gens, domain=QQ)
    except (PolynomialError, CoercionFailed, GeneratorsNeeded) as e:
        raise PolynomialParseError(text, f"not a polynomial over QQ ({e})", line, 0) from e


def format_poly(p: Poly) -> str:
    """Print a polynomial in the plain-text format."""
    return sympy.sstr(p.as_expr(), order="lex").replace("**", "^")


def univariate(p: Poly, what: str = "polynomial") -> Poly:
    """Return ``p`` unchanged after checking it has a single generator."""
    if len(p.gens) != 1:
        raise CompositionError(f"composition requires univariate {what}, got generators {p.gens}")
    return p


def poly_compose(outer: Poly, inner: Poly) -> Poly:
    """
    Compose two univariate polynomials in the same variable.

    Returns:
        outer(inner(x)), of degree deg(outer) * deg(inner)

    Raises:
        CompositionError: On multivariate input or mismatched variables
    """
    univariate(outer, "outer")
    univariate(inner, "inner")
    if outer.gens != inner.gens:
        raise CompositionError(f"composition requires the same variable, got {outer.gens} and {inner.gens}")
    return outer.compose(inner)


def identity(gen: sympy.Symbol = X) -> Poly:
    return Poly(gen, gen, domain=QQ)


def poly_iterate(f: Poly, m: int, degree_cap: Optional[int] = None) -> Poly:
    """
    m-fold composition f^m, with f^0 the identity.

    Raises:
        DegreeError: If f is not univariate of degree at least 1
        IterateTooLargeError: If deg(f)^m exceeds the degree cap
    """
    univariate(f)
    if m < 0:
        raise ValueError("iterate count must be nonnegative")
    d = f.degree()
    if d < 1:
        raise DegreeError("iteration requires deg(f) >= 1")

    cap = degree_cap or settings.ITERATE_DEGREE_CAP
    if d ** m > cap:
        raise IterateTooLargeError(f"iterate f^{m} has degree {d ** m} above the cap {cap}")

    result = identity(f.gen)
    for _ in range(m):
        result = f.compose(result)
    return result


def iterates(f: Poly, count: int, degree_cap: Optional[int] = None) -> Iterable[Poly]:
    """Yield f^1, ..., f^count, stopping silently at the degree cap."""
    cap = degree_cap or settings.ITERATE_DEGREE_CAP
    current = f
    for _ in range(count):
        if current.degree() > cap:
            return
        yield current
        current = f.compose(current)


def support(p: Poly) -> list[int]:
    """Exponents with nonzero coefficient of a univariate polynomial."""
    return [monom[0] for monom, _ in p.terms()]


def degree_in(p: Poly, gen: sympy.Symbol) -> int:
    """Degree of ``p`` in ``gen`` (0 when the generator is absent)."""
    if gen not in p.gens:
        return 0
    return max(p.degree(gen), 0)


def cyclotomic(order: int) -> Poly:
    """The minimal polynomial of a primitive order-th root of unity, in ``ZETA``."""
    if order < 1:
        raise ValueError("order must be at least 1")
    return Poly(sympy.cyclotomic_poly(order, ZETA), ZETA, domain=QQ)


def reduce_mod_cyclotomic(expr: sympy.Expr, order: int) -> sympy.Expr:
    """
    Reduce ``expr`` modulo Phi_order(ZETA).

    The result has ZETA-degree below phi(order), so an expression vanishes in
    Q(zeta)[x1, ...] exactly when the result is literally 0.
    """
    expr = sympy.expand(expr)
    if ZETA not in expr.free_symbols:
        return expr
    return sympy.expand(sympy.rem(expr, cyclotomic(order).as_expr(), ZETA))


def has_zeta(p: Poly) -> bool:
    return ZETA in p.gens


def norm_to_rationals(expr: sympy.Expr, order: int) -> sympy.Expr:
    """
    Res_ZETA(Phi_order, expr): the product of the Galois conjugates of ``expr``.

    Its zero set is the union of the conjugate zero sets, defined over Q.
    """
    expr = sympy.expand(expr)
    if ZETA not in expr.free_symbols:
        return expr
    return sympy.expand(sympy.resultant(cyclotomic(order).as_expr(), expr, ZETA))
