"""Projections F^J of the ambient variety, sampled points of X, anomaly gates and the coefficient-vanishing gate."""
import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import sympy
from sympy import QQ, Poly

from src.algebra.algebraic import AlgebraicNumber, ball_eval, vanishes_at
from src.algebra.polynomials import X, coordinate_index, format_poly
from src.algebra.solving import eliminant, eliminate, solve_zero_dimensional
from src.config import settings
from src.dynamics.commute import is_commuter
from src.dynamics.heights import split_by_pivot
from src.exceptions import AnomalousFiberError, ConfigError, XoaEmptyError
from src.geometry.varieties import AmbientVariety, as_point, graph_text

logger = logging.getLogger(__name__)

SAMPLE_ATTEMPTS = 8


@dataclass(frozen=True)
class VanishingCheck:
    """Whether some F_k (k >= 1) is nonzero at the point, and the largest such k."""

    nonzero: bool
    index: Optional[int] = None

    def __bool__(self) -> bool:
        return self.nonzero


def _coordinate_values(point: Union[Mapping[int, object], Sequence[object]], size: int) -> list[AlgebraicNumber]:
    if isinstance(point, Mapping):
        items = dict(point)
    else:
        items = {i: value for i, value in enumerate(point, start=1)}
    values = []
    for i in range(1, size + 1):
        value = items.get(i)
        if value is None:
            values.append(AlgebraicNumber.from_rational(0))
            continue
        p = as_point(value)
        if p.is_infinity:
            raise ValueError(f"coordinate x{i} is infinite; the gate is defined on the affine part")
        values.append(p.value)
    return values


def _max_index(F: Poly) -> int:
    indices = [coordinate_index(g) for g in F.gens if g != X]
    return max(indices, default=1)


def coefficient_vanishing_check(
    F: Poly, pivot: sympy.Symbol, point: Union[Mapping[int, object], Sequence[object]]
) -> VanishingCheck:
    """
    Write F = F_D x^D + ... + F_1 x + F_0 in the pivot and test the F_k, k >= 1, at ``point``.

    ``point`` supplies the other coordinates, either as a mapping from
    coordinate index or as a full tuple; the pivot slot is ignored.
    """
    D, parts = split_by_pivot(F, pivot)
    values = _coordinate_values(point, _max_index(F))
    for k in range(D, 0, -1):
        part = parts[k]
        if part.is_zero:
            continue
        if part.is_ground:
            return VanishingCheck(True, k)
        if not vanishes_at(part, values):
            return VanishingCheck(True, k)
    return VanishingCheck(False, None)


def coefficient_vanishing_system(F: Poly, pivot: sympy.Symbol) -> list[Poly]:
    """The equations F_1 = ... = F_D = 0 of the locus where the gate fails."""
    _, parts = split_by_pivot(F, pivot)
    return [part for part in parts[1:] if not part.is_zero]


def _random_rational(rng: random.Random) -> sympy.Rational:
    return sympy.Rational(rng.randint(-9, 9), rng.randint(1, 4))


def sample_points(
    variety: AmbientVariety,
    count: int,
    seed: Optional[int] = None,
    free: Optional[Sequence[int]] = None,
) -> list[tuple[AlgebraicNumber, ...]]:
    """
    Points of X found by fixing ``free`` coordinates at random rationals and solving for the rest.

    Deterministic for a fixed seed.
    """
    r = variety.dim_hint
    free = list(free) if free is not None else list(range(1, r + 1))
    if len(free) != r:
        raise ValueError(f"exactly {r} free coordinates are needed, got {free}")
    rng = random.Random(settings.SEED if seed is None else seed)
    symbols = variety.symbols
    unknowns = [symbols[i - 1] for i in range(1, variety.n + 1) if i not in free]

    points: list[tuple[AlgebraicNumber, ...]] = []
    for _ in range(count * SAMPLE_ATTEMPTS):
        if len(points) >= count:
            break
        chosen = {symbols[i - 1]: _random_rational(rng) for i in free}
        equations = [sympy.expand(p.as_expr().subs(chosen)) for p in variety.equations]
        if any(e.is_number and e != 0 for e in equations):
            continue
        try:
            solutions = solve_zero_dimensional([e for e in equations if e != 0], unknowns)
        except AnomalousFiberError:
            continue
        for solution in solutions:
            values = dict(zip(unknowns, solution))
            full = []
            for s in symbols:
                full.append(values[s] if s in values else AlgebraicNumber.from_rational(chosen[s]))
            points.append(tuple(full))
            if len(points) >= count:
                break
    return points


def _squarefree_factors(relations: list[sympy.Expr], gens: Sequence[sympy.Symbol]) -> list[Poly]:
    polys = [Poly(r, *gens, domain=QQ) for r in relations]
    common = polys[0]
    for p in polys[1:]:
        common = common.gcd(p)
    return [factor for factor, _ in common.factor_list()[1]]


def projection_hypersurface(
    variety: AmbientVariety,
    J: Sequence[int],
    seed: Optional[int] = None,
) -> Poly:
    """
    F^J: the equation of the projection of X to the coordinates J, |J| = dim X + 1.

    Variables outside J are eliminated by resultants; when several irreducible
    factors survive, the ones vanishing on sampled points of X are kept.

    Raises:
        XoaEmptyError: If the affine part is empty or the projection has dimension below dim X
        ConfigError: If the projection is dominant, contradicting the dimension hint
    """
    r = variety.dim_hint
    J = tuple(J)
    if len(J) != r + 1 or len(set(J)) != len(J) or not all(1 <= j <= variety.n for j in J):
        raise ValueError(f"J must list {r + 1} distinct coordinates of 1..{variety.n}, got {J}")
    gens = [variety.symbols[j - 1] for j in J]

    relations = eliminate(variety.equations, variety.symbols, gens)
    if not relations:
        raise ConfigError(f"projection of {variety.name} to {J} is dominant; the dimension hint {r} is too small")
    if any(sympy.sympify(rel).is_number for rel in relations):
        raise XoaEmptyError(f"the affine part of {variety.name} is empty")

    factors = _squarefree_factors(relations, gens)
    if not factors:
        raise XoaEmptyError(f"projection of {variety.name} to coordinates {J} has dimension below {r}")
    if len(factors) > 1:
        samples = sample_points(variety, 3, seed, free=J[:r])
        if samples:
            bits = settings.PRECISION_BITS
            kept = [
                factor
                for factor in factors
                if all(ball_eval(factor, point, bits).contains_zero() for point in samples)
                and all(vanishes_at(factor, point) for point in samples)
            ]
            factors = kept or factors
    F = factors[0]
    for factor in factors[1:]:
        F = F * factor

    missing = [j for j, g in zip(J, gens) if F.degree(g) <= 0]
    if missing:
        raise XoaEmptyError(
            f"projection of {variety.name} to coordinates {J} has dimension below {r}"
            f" (x{missing[0]} does not occur in F^J)"
        )
    logger.debug("Projection hypersurface", extra={"J": list(J), "F": format_poly(F)})
    return F


@dataclass(frozen=True)
class GateReport:
    """Gates passed by X, with the projections F^J computed along the way."""

    checks: tuple[str, ...] = ()
    projections: Mapping[tuple[int, ...], Poly] = field(default_factory=dict)

    def projection(self, J: Sequence[int]) -> Poly:
        return self.projections[tuple(sorted(J))]


def _graph_generator(relation: Poly, target: sympy.Symbol, source: sympy.Symbol) -> Optional[Poly]:
    """g with relation = c (target - g(source)), when the relation has that shape."""
    if relation.degree(target) != 1:
        return None
    expr = sympy.expand(relation.as_expr())
    lead = expr.coeff(target, 1)
    if not lead.is_number:
        return None
    rest = sympy.expand(-(expr - lead * target) / lead)
    if rest.free_symbols - {source}:
        return None
    g = Poly(rest.subs(source, X), X, domain=QQ)
    return g if g.degree() >= 1 else None


def check_gates(variety: AmbientVariety, f: Poly, k_max: Optional[int] = None) -> GateReport:
    """
    Run the anomaly gates on X; each failure means X is anomalous as a whole, so X^oa is empty.

    Gates, in order: nonempty affine part, no constant coordinate, X not inside
    a periodic graph x_j = g(x_k) (curves), and every projection F^J to
    dim X + 1 coordinates involving all of them.

    Raises:
        XoaEmptyError: With the reason of the first failing gate
    """
    checks = []
    if any(p.is_ground for p in variety.equations):
        raise XoaEmptyError(f"the affine part of {variety.name} is empty")
    checks.append("affine part nonempty")

    r = variety.dim_hint
    symbols = variety.symbols
    if r == 0:
        checks.append("X is finite")
        return GateReport(tuple(checks), {})

    for i, s in enumerate(symbols, start=1):
        e = eliminant(variety.equations, symbols, s)
        if e is None:
            continue
        if e.degree() <= 0:
            raise XoaEmptyError(f"the affine part of {variety.name} is empty")
        raise XoaEmptyError(f"coordinate x{i} is constant on {variety.name} (roots of {format_poly(e)})")
    checks.append("no constant coordinate")

    if r == 1:
        for j, k in itertools.permutations(range(1, variety.n + 1), 2):
            relations = eliminate(variety.equations, symbols, [symbols[j - 1], symbols[k - 1]])
            if not relations:
                continue
            factors = _squarefree_factors(relations, [symbols[j - 1], symbols[k - 1]])
            if len(factors) != 1:
                continue
            g = _graph_generator(factors[0], symbols[j - 1], symbols[k - 1])
            if g is not None and is_commuter(g, f, k_max) is not None:
                raise XoaEmptyError(f"{variety.name} lies in the periodic hypersurface {graph_text(j, g, k)}")
        checks.append("not inside a periodic graph hypersurface")

    projections = {}
    for J in itertools.combinations(range(1, variety.n + 1), r + 1):
        projections[J] = projection_hypersurface(variety, J)
    checks.append(f"all {len(projections)} projections to {r + 1} coordinates are hypersurfaces")
    logger.info("Anomaly gates passed", extra={"variety": variety.name, "projections": len(projections)})
    return GateReport(tuple(checks), projections)
