"""Zero-dimensional polynomial systems solved by resultant eliminants and certified filtering."""
import itertools
import logging
import math
from typing import Optional, Sequence

import sympy
from sympy import QQ, Poly

from src.algebra.algebraic import AlgebraicNumber, ball_eval, distinct_roots, vanishes_at
from src.algebra.polynomials import X
from src.config import settings
from src.exceptions import AnomalousFiberError

logger = logging.getLogger(__name__)


def _as_polys(equations: Sequence, variables: Sequence[sympy.Symbol]) -> list[Poly]:
    polys = []
    for equation in equations:
        expr = equation.as_expr() if isinstance(equation, Poly) else sympy.sympify(equation)
        extra = expr.free_symbols - set(variables)
        if extra:
            raise ValueError(f"equation involves unknowns outside the system: {sorted(map(str, extra))}")
        p = Poly(expr, *variables, domain=QQ)
        if not p.is_zero:
            polys.append(p)
    return polys


def eliminate(equations: Sequence, variables: Sequence[sympy.Symbol], keep: Sequence[sympy.Symbol]) -> list[sympy.Expr]:
    """
    Nonzero consequences of ``equations`` involving only the ``keep`` variables.

    Variables outside ``keep`` are eliminated one at a time by resultants,
    smallest degree first. A variable occurring in a single equation is
    unconstrained, and that equation is dropped.
    """
    polys = [p.as_expr() for p in _as_polys(equations, variables)]
    others = [v for v in variables if v not in keep]

    while others:
        others.sort(key=lambda v: max((sympy.degree(p, v) for p in polys), default=0))
        v = others.pop(0)
        with_v = sorted((p for p in polys if sympy.degree(p, v) > 0), key=lambda p: sympy.degree(p, v))
        without = [p for p in polys if sympy.degree(p, v) <= 0]
        if len(with_v) < 2:
            polys = without
            continue
        base = with_v[0]
        eliminated = []
        for other in with_v[1:]:
            r = sympy.expand(sympy.resultant(base, other, v))
            if r != 0:
                eliminated.append(r)
        polys = without + eliminated
    return polys


def eliminant(equations: Sequence[Poly], variables: Sequence[sympy.Symbol], keep: sympy.Symbol) -> Optional[Poly]:
    """
    A nonzero univariate polynomial in ``keep`` vanishing on every solution.

    Returns None when the equations impose no condition on ``keep``.
    """
    relations = [Poly(p, keep, domain=QQ) for p in eliminate(equations, variables, [keep])]
    relations = [p for p in relations if not p.is_zero]
    if not relations:
        return None
    g = relations[0]
    for p in relations[1:]:
        g = g.gcd(p)
    return g


def _tuple_key(values: tuple[AlgebraicNumber, ...]) -> tuple:
    return tuple((a.degree, float(a.center.real), float(a.center.imag)) for a in values)


def solve_zero_dimensional(
    equations: Sequence,
    variables: Sequence[sympy.Symbol],
    precision_bits: Optional[int] = None,
) -> list[tuple[AlgebraicNumber, ...]]:
    """
    All common zeros of a zero-dimensional system.

    Args:
        equations: Polynomials (Poly or sympy expressions) in ``variables``
        variables: Unknowns, coordinate symbols ``x<k>`` or ``x``
        precision_bits: Initial precision for root isolation

    Returns:
        Solution tuples ordered like ``variables``

    Raises:
        AnomalousFiberError: If some unknown is left unconstrained
    """
    bits = precision_bits or settings.PRECISION_BITS
    polys = _as_polys(equations, variables)
    if not polys:
        raise AnomalousFiberError("the reduced system has no equations left (positive-dimensional)")

    if len(variables) == 1:
        v = variables[0]
        g = polys[0]
        for p in polys[1:]:
            g = g.gcd(p)
        if g.degree() <= 0:
            return []
        univariate = Poly(g.as_expr().subs(v, X), X, domain=QQ)
        return [(root,) for root in distinct_roots(univariate, bits)]

    candidates = []
    for v in variables:
        e = eliminant(polys, variables, v)
        if e is None:
            raise AnomalousFiberError(f"unknown {v} is unconstrained (positive-dimensional fiber)")
        if e.degree() <= 0:
            return []
        candidates.append(distinct_roots(Poly(e.as_expr().subs(v, X), X, domain=QQ), bits))

    # equations are rewritten in x1..xk so that evaluation can index the tuple
    slots = [sympy.Symbol(f"x{i + 1}") for i in range(len(variables))]
    renamed = [Poly(p.as_expr().subs(dict(zip(variables, slots)), simultaneous=True), *slots, domain=QQ) for p in polys]

    solutions = []
    for values in itertools.product(*candidates):
        if any(not ball_eval(p, values, bits).contains_zero() for p in renamed):
            continue
        if all(vanishes_at(p, values) for p in renamed):
            solutions.append(tuple(values))
    logger.debug(
        "Solved zero-dimensional system",
        extra={"unknowns": len(variables), "candidates": math.prod(len(c) for c in candidates), "solutions": len(solutions)},
    )
    return sorted(solutions, key=_tuple_key)


