"""
Ambient, periodic and special subvarieties of (P^1)^n for the diagonal action of f.

A periodic subvariety is described by its signature, the periodic constants
on J_V and one generator per non-head chain position: x_j = g_j(x_p) with p
the predecessor of j in its chain, every g_j commuting with an iterate of f.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Mapping, Optional, Sequence, Union

import sympy
from sympy import QQ, Poly

from src.algebra.algebraic import AlgebraicNumber, P1Point, algebraic_eval, evaluate_at, root_of_unity, vanishes_at
from src.algebra.polynomials import (
    X,
    ZETA,
    coordinate_symbols,
    format_poly,
    has_zeta,
    norm_to_rationals,
    parse_poly,
    reduce_mod_cyclotomic,
    univariate,
)
from src.dynamics.commute import is_commuter
from src.dynamics.heights import orbit_step, preperiodic_structure
from src.exceptions import NonCommuterError, NonPeriodicConstantError, PolynomialParseError
from src.geometry.signatures import Signature, canonical_signature

logger = logging.getLogger(__name__)

PointLike = Union[P1Point, AlgebraicNumber, int, sympy.Rational]


def as_point(value: PointLike) -> P1Point:
    return value if isinstance(value, P1Point) else P1Point.finite(value)


@dataclass(frozen=True)
class AmbientVariety:
    """X in the affine chart of (P^1)^n, cut out by ``equations`` in x1..xn, of dimension ``dim_hint``."""

    n: int
    equations: tuple[Poly, ...]
    dim_hint: int
    name: str = "X"

    def __post_init__(self):
        if not self.equations:
            raise ValueError("an ambient variety needs at least one equation")
        if any(p.is_zero for p in self.equations):
            raise ValueError("defining equations must be nonzero")
        if not 0 <= self.dim_hint < self.n:
            raise ValueError(f"dimension hint must lie in 0..{self.n - 1}, got {self.dim_hint}")

    @classmethod
    def from_strings(
        cls, equations: Sequence[str], n: int, dim_hint: Optional[int] = None, name: str = "X"
    ) -> "AmbientVariety":
        """
        Parse equations in x1..xn; the dimension defaults to n minus the number of equations.

        Raises:
            PolynomialParseError: With the 1-based equation number as line
        """
        gens = coordinate_symbols(n)
        polys = []
        for line, text in enumerate(equations, start=1):
            p = parse_poly(text, gens, line)
            if p.is_zero:
                raise PolynomialParseError(text, "equation is identically zero", line, 0)
            polys.append(p)
        dim = dim_hint if dim_hint is not None else n - len(polys)
        return cls(n, tuple(polys), dim, name)

    @property
    def symbols(self) -> tuple[sympy.Symbol, ...]:
        return coordinate_symbols(self.n)

    def contains(self, point: Sequence[PointLike]) -> bool:
        """Exact membership of an affine point."""
        values = [as_point(a) for a in point]
        if len(values) != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {len(values)}")
        if any(v.is_infinity for v in values):
            return False
        numbers = [v.value for v in values]
        return all(vanishes_at(p, numbers) for p in self.equations)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "dim": self.dim_hint,
            "equations": [format_poly(p) for p in self.equations],
        }


@dataclass(frozen=True)
class DVValue:
    """D(V): the smallest degree of a chain's last generator, or +inf when every chain has length 1."""

    value: Optional[int] = None

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def exceeds(self, bound: float) -> bool:
        return self.is_infinite or self.value > bound

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)

    def to_dict(self) -> Union[int, str]:
        return "inf" if self.value is None else self.value


def graph_text(j: int, g: Poly, p: int) -> str:
    """``x<j>=g(x<p>)`` with g written out in x<p>."""
    body = sympy.sstr(g.as_expr().subs(X, sympy.Symbol(f"x{p}")), order="lex").replace("**", "^")
    return f"x{j}={body}"


def _lcm(values) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def generator_poly(expr: sympy.Expr, zeta_order: int = 1) -> Poly:
    """A generator in X over QQ, or in X and ZETA reduced modulo Phi_zeta_order."""
    if ZETA in sympy.sympify(expr).free_symbols:
        return Poly(reduce_mod_cyclotomic(expr, zeta_order), X, ZETA, domain=QQ)
    return Poly(sympy.expand(expr), X, domain=QQ)


def _as_generator(g: Poly, zeta_order: int) -> Poly:
    others = [gen for gen in g.gens if gen != ZETA]
    if len(others) > 1:
        univariate(Poly(g.as_expr(), *others), "generator")
    expr = g.as_expr().subs(others[0], X) if others else g.as_expr()
    return generator_poly(expr, zeta_order)


@dataclass(frozen=True)
class PeriodicSubvariety:
    """
    V = a_V x C_1 x ... x C_k, validated against f.

    ``periods`` and ``witnesses`` hold, per coordinate, the exact period of the
    constant and the iterate each generator was verified against. Generators
    with coefficients in Q(zeta) are polynomials in X and ZETA, ZETA being
    exp(2*pi*i/zeta_order).
    """

    signature: Signature
    f: Poly
    constants: Mapping[int, P1Point] = field(default_factory=dict)
    generators: Mapping[int, Poly] = field(default_factory=dict)
    periods: Mapping[int, int] = field(default_factory=dict)
    witnesses: Mapping[int, int] = field(default_factory=dict)
    zeta_order: int = 1

    @property
    def n(self) -> int:
        return self.signature.n

    @property
    def dimension(self) -> int:
        return self.signature.dimension

    @property
    def D_V(self) -> DVValue:
        degrees = [self.generators[chain[-1]].degree() for chain in self.signature.chains if len(chain) >= 2]
        return DVValue(min(degrees) if degrees else None)

    @property
    def cycle_length(self) -> int:
        """P with phi^P(V) = V: the lcm of constant periods and generator witnesses."""
        return _lcm(list(self.periods.values()) + list(self.witnesses.values()))

    @property
    def uses_zeta(self) -> bool:
        return any(has_zeta(g) for g in self.generators.values())

    def chain_map(self, j: int) -> Poly:
        """x_j as a polynomial in the head of its chain."""
        composite = X
        for chain in self.signature.chains:
            if j in chain:
                for i in chain[1 : chain.index(j) + 1]:
                    composite = self.generators[i].as_expr().subs(X, composite)
                return generator_poly(composite, self.zeta_order)
        raise ValueError(f"coordinate {j} is not on a chain")

    def relations(self) -> list[Poly]:
        """Chain equations x_j - g_j(x_p) in x1..xn, and ZETA when a generator needs it."""
        gens = coordinate_symbols(self.n) + ((ZETA,) if self.uses_zeta else ())
        result = []
        for j, g in sorted(self.generators.items()):
            p = self.signature.predecessor(j)
            expr = gens[j - 1] - g.as_expr().subs(X, gens[p - 1])
            result.append(Poly(expr, *gens, domain=QQ))
        return result

    def canonical(self) -> Signature:
        """Signature with chains reversed where every generator is linear, for deduplication."""
        reversible = [
            index
            for index, chain in enumerate(self.signature.chains)
            if all(self.generators[i].degree() == 1 for i in chain[1:])
        ]
        return canonical_signature(self.signature, reversible)

    def contains(self, point: Sequence[PointLike]) -> bool:
        return membership(self, point)

    def __str__(self) -> str:
        parts = [f"x{i}={self.constants[i]}" for i in self.signature.fixed]
        for j, g in sorted(self.generators.items()):
            p = self.signature.predecessor(j)
            parts.append(graph_text(j, g, p))
        return ", ".join(parts) or f"(P^1)^{self.n}"

    def to_dict(self) -> dict:
        data = {
            "signature": self.signature.to_dict(),
            "constants": {str(i): self.constants[i].to_dict() for i in sorted(self.constants)},
            "generators": {str(j): format_poly(g) for j, g in sorted(self.generators.items())},
            "D_V": self.D_V.to_dict(),
            "periods": {str(i): p for i, p in sorted(self.periods.items())},
            "witnesses": {str(j): k for j, k in sorted(self.witnesses.items())},
        }
        if self.uses_zeta:
            data["zeta"] = f"exp(2*pi*I/{self.zeta_order})"
        return data


@dataclass(frozen=True)
class SpecialSubvariety:
    """a_Z x Z': arbitrary constants on ``fixed_coords``, a periodic variety on the remaining coordinates."""

    n: int
    fixed_coords: Mapping[int, P1Point]
    periodic_part: Optional[PeriodicSubvariety] = None

    def __post_init__(self):
        rest = self.n - len(self.fixed_coords)
        if self.periodic_part is None and rest:
            raise ValueError("a periodic part is required unless every coordinate is fixed")
        if self.periodic_part is not None and self.periodic_part.n != rest:
            raise ValueError("the fixed and periodic coordinates must partition 1..n")

    @property
    def free_coordinates(self) -> list[int]:
        return [i for i in range(1, self.n + 1) if i not in self.fixed_coords]

    def contains(self, point: Sequence[PointLike]) -> bool:
        return membership(self, point)


def _periodic_constant(f: Poly, zeta: P1Point, cap: Optional[int]) -> int:
    if zeta.is_infinity:
        return 1
    structure = preperiodic_structure(f, zeta, cap)
    if structure is None or structure[0] != 0:
        prefix = [str(zeta.value)]
        current = zeta.value
        for _ in range(4):
            current = orbit_step(f, current)
            prefix.append(str(current))
        raise NonPeriodicConstantError(f"constant {zeta} is not f-periodic within the period cap", prefix)
    return structure[1]


def build_periodic(
    signature: Signature,
    constants: Mapping[int, PointLike],
    generators: Mapping[int, Poly],
    f: Poly,
    period_cap: Optional[int] = None,
    k_max: Optional[int] = None,
    zeta_order: int = 1,
) -> PeriodicSubvariety:
    """
    Validate the defining data of a periodic subvariety.

    Args:
        signature: J_V and the ordered chains
        constants: x_i = zeta_i for every i in J_V
        generators: x_j = g_j(x_p) for every non-head chain position j
        f: The polynomial acting diagonally
        period_cap: Longest period searched for the constants
        k_max: Largest iterate f^k tried against each generator
        zeta_order: Order of the root of unity ZETA in generators over Q(zeta)

    Raises:
        NonPeriodicConstantError: If a constant is not periodic; carries an orbit prefix
        NonCommuterError: If a generator commutes with no searched iterate
    """
    univariate(f)
    if set(constants) != set(signature.fixed):
        raise ValueError(f"constants must be given exactly on J_V={list(signature.fixed)}")
    positions = {i for chain in signature.chains for i in chain[1:]}
    if set(generators) != positions:
        raise ValueError(f"generators must be given exactly on the non-head positions {sorted(positions)}")

    points = {i: as_point(zeta) for i, zeta in constants.items()}
    periods = {i: _periodic_constant(f, zeta, period_cap) for i, zeta in points.items()}

    witnesses = {}
    normalized = {}
    for j, g in generators.items():
        g = _as_generator(g, zeta_order)
        if g.degree() < 1:
            raise NonCommuterError(f"generator for x{j} is constant", format_poly(g))
        k = is_commuter(g, f, k_max, zeta_order if has_zeta(g) else None)
        if k is None:
            raise NonCommuterError(
                f"generator {format_poly(g)} for x{j} commutes with no searched iterate of f",
                f"({format_poly(g)}) o f^k != f^k o ({format_poly(g)})",
            )
        witnesses[j] = k
        normalized[j] = g

    V = PeriodicSubvariety(signature, f, points, normalized, periods, witnesses, zeta_order)
    logger.debug("Periodic subvariety built", extra={"variety": str(V), "D_V": str(V.D_V)})
    return V


def apply_generator(g: Poly, a: P1Point, zeta_order: int = 1) -> P1Point:
    if a.is_infinity:
        return a
    if has_zeta(g):
        return P1Point(evaluate_at(g, [a.value], root_of_unity(1, zeta_order)))
    return P1Point(algebraic_eval(g, a.value))


def membership(V: Union[PeriodicSubvariety, SpecialSubvariety], point: Sequence[PointLike]) -> bool:
    """Exact check of the constants and chain relations of V at ``point``."""
    values = [as_point(a) for a in point]
    if len(values) != V.n:
        raise ValueError(f"expected {V.n} coordinates, got {len(values)}")

    if isinstance(V, SpecialSubvariety):
        if any(values[i - 1] != zeta for i, zeta in V.fixed_coords.items()):
            return False
        if V.periodic_part is None:
            return True
        return membership(V.periodic_part, [values[i - 1] for i in V.free_coordinates])

    if any(values[i - 1] != zeta for i, zeta in V.constants.items()):
        return False
    for j, g in V.generators.items():
        p = V.signature.predecessor(j)
        if apply_generator(g, values[p - 1], V.zeta_order) != values[j - 1]:
            return False
    return True


@dataclass(frozen=True)
class Embedding:
    """
    e_V : (P^1)^{n-1} -> (P^1)^n onto a periodic hypersurface V.

    V is x_i = zeta (``zeta`` set) or x_i = g(x_j) (``g`` and ``source`` set),
    with indices in (P^1)^n. A graph over Q(zeta) keeps ``g`` in X and ZETA.
    """

    n: int
    slot: int
    zeta: Optional[P1Point] = None
    g: Optional[Poly] = None
    source: Optional[int] = None
    zeta_order: int = 1

    @property
    def source_in_domain(self) -> Optional[int]:
        """Index of x_j among the n-1 coordinates of the domain."""
        if self.source is None:
            return None
        return self.source - 1 if self.slot < self.source else self.source

    @property
    def over_cyclotomic(self) -> bool:
        return self.g is not None and has_zeta(self.g)

    def apply(self, point: Sequence[PointLike]) -> tuple[P1Point, ...]:
        values = [as_point(a) for a in point]
        if len(values) != self.n - 1:
            raise ValueError(f"e_V expects {self.n - 1} coordinates, got {len(values)}")
        if self.zeta is not None:
            inserted = self.zeta
        else:
            inserted = apply_generator(self.g, values[self.source_in_domain - 1], self.zeta_order)
        return tuple(values[: self.slot - 1]) + (inserted,) + tuple(values[self.slot - 1 :])

    def hypersurface(self) -> Poly:
        """The defining equation of V, with ZETA as an extra generator over Q(zeta)."""
        gens = coordinate_symbols(self.n)
        if self.zeta is not None:
            q = self._rational_zeta()
            return Poly(gens[self.slot - 1] - q, *gens, domain=QQ)
        expr = gens[self.slot - 1] - self.g.as_expr().subs(X, gens[self.source - 1])
        if self.over_cyclotomic:
            return Poly(expr, *gens, ZETA, domain=QQ)
        return Poly(expr, *gens, domain=QQ)

    def _rational_zeta(self) -> sympy.Rational:
        if self.zeta.is_infinity or not self.zeta.value.is_rational:
            raise ValueError("pull-back through an irrational or infinite constant is not supported")
        return self.zeta.value.rational

    def pull_back(self, equations: Sequence[Poly]) -> list[Poly]:
        """
        e_V^{-1} of the variety cut out by ``equations``: substitute x_i and renumber.

        Equations that become zero are dropped; a nonzero constant marks an empty pull-back.
        Over Q(zeta) each equation is reduced modulo Phi and replaced by its norm, so the
        result is the union of the Galois-conjugate pull-backs, cut out over Q.
        """
        gens = coordinate_symbols(self.n)
        target = coordinate_symbols(self.n - 1)
        if self.zeta is not None:
            replacement = self._rational_zeta()
        else:
            replacement = self.g.as_expr().subs(X, gens[self.source - 1])

        renumber = {gens[t - 1]: target[t - 2] for t in range(self.slot + 1, self.n + 1)}
        pulled = []
        for p in equations:
            expr = p.as_expr().subs(gens[self.slot - 1], replacement)
            expr = sympy.expand(expr.subs(renumber, simultaneous=True))
            if self.over_cyclotomic:
                expr = reduce_mod_cyclotomic(expr, self.zeta_order)
                if expr != 0:
                    expr = norm_to_rationals(expr, self.zeta_order)
            if expr != 0:
                pulled.append(Poly(expr, *target, domain=QQ) if target else Poly(expr, X, domain=QQ))
        return pulled

    def pull_back_variety(self, variety: AmbientVariety) -> AmbientVariety:
        """e_V^{-1}(X cap V) with its dimension lowered by one."""
        equations = self.pull_back(variety.equations)
        return AmbientVariety(self.n - 1, tuple(equations), variety.dim_hint - 1, f"e^-1({variety.name})")

    def to_dict(self) -> dict:
        if self.zeta is not None:
            return {"equation": f"x{self.slot}={self.zeta}"}
        data = {"equation": graph_text(self.slot, self.g, self.source)}
        if self.over_cyclotomic:
            data["zeta"] = f"exp(2*pi*I/{self.zeta_order})"
        return data


def embed_in_hypersurface(n: int, relation: tuple, zeta_order: int = 1) -> Embedding:
    """
    e_V for V given as (i, zeta) or (i, j, g); g may be a polynomial in X and ZETA.

    Raises:
        ValueError: On indices outside 1..n or i == j
    """
    if len(relation) == 2:
        i, zeta = relation
        if not 1 <= i <= n:
            raise ValueError(f"slot {i} outside 1..{n}")
        return Embedding(n, i, zeta=as_point(zeta))
    i, j, g = relation
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise ValueError(f"graph hypersurface needs distinct indices in 1..{n}, got {i}, {j}")
    return Embedding(n, i, g=_as_generator(g, zeta_order), source=j, zeta_order=zeta_order)


def graph_embedding(V: PeriodicSubvariety, j: int) -> Embedding:
    """e_H for the hypersurface H: x_j = g_j(x_p) containing V."""
    return embed_in_hypersurface(V.n, (j, V.signature.predecessor(j), V.generators[j]), V.zeta_order)
