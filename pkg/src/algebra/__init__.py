"""Exact rational and algebraic arithmetic."""
from src.algebra.algebraic import (
    AlgebraicNumber,
    P1Point,
    algebraic_combine,
    algebraic_eval,
    evaluate_at,
    isolate_roots,
    parse_point,
)
from src.algebra.polynomials import X, format_poly, parse_poly, poly_compose, poly_iterate
from src.algebra.solving import solve_zero_dimensional

__all__ = [
    "AlgebraicNumber",
    "P1Point",
    "X",
    "algebraic_combine",
    "algebraic_eval",
    "evaluate_at",
    "format_poly",
    "isolate_roots",
    "parse_point",
    "parse_poly",
    "poly_compose",
    "poly_iterate",
    "solve_zero_dimensional",
]
