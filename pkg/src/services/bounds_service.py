"""
Bounded-height certificates, the structure degree bound, and the experiments built on them.

The pure operations (certificate, sample_intersection, structure_degree_bound,
growth_row) run in worker processes; BoundsService fans them out per
periodic variety and per m and aggregates the results.
"""
import asyncio
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath
import sympy
from mpmath import mpf
from sympy import QQ, Poly

from src.algebra.algebraic import AlgebraicNumber, P1Point, algebraic_eval, distinct_roots, parse_point, root_of_unity
from src.algebra.polynomials import X as GEN, ZETA, coordinate_symbols, cyclotomic, format_poly, identity, poly_iterate
from src.algebra.solving import eliminant, solve_zero_dimensional
from src.config import settings
from src.dynamics.classify import classify
from src.dynamics.commute import MINIMAL_COMMUTER_SEARCH, Commuter, commuters_up_to
from src.dynamics.heights import (
    HeightValue,
    InequalityConstants,
    canonical_difference_constant,
    canonical_height,
    canonical_bound_coefficients,
    height_expansion_constant,
    height_n,
    inequality_constants,
    integer_min_poly,
    preperiodic_structure,
    upper_height_constant,
    weil_height,
)
from src.exceptions import (
    AnomalousFiberError,
    ConfigError,
    IterateTooLargeError,
    NotDisintegratedError,
    PreperiodicSeedError,
    XoaEmptyError,
)
from src.geometry.elimination import GateReport, check_gates, coefficient_vanishing_check, coefficient_vanishing_system
from src.geometry.signatures import Signature, enumerate_signatures
from src.geometry.varieties import (
    AmbientVariety,
    PeriodicSubvariety,
    apply_generator,
    build_periodic,
    embed_in_hypersurface,
    graph_text,
    membership,
)
from src.models.reports import (
    CertificateRecord,
    GrowthRow,
    GrowthTable,
    PointRecord,
    ProvenanceEntry,
    StructureRecord,
)

logger = logging.getLogger(__name__)


def require_disintegrated(f: Poly) -> None:
    label = classify(f)
    if not label.is_disintegrated:
        raise NotDisintegratedError(f"f={format_poly(f)} is not disintegrated ({label.label})", label.label)


@dataclass(frozen=True)
class ProjectionConstants:
    """F^J with its pivot and the inequality constants computed for it."""

    J: tuple[int, ...]
    pivot: int
    F: Poly
    constants: InequalityConstants

    def to_record(self):
        return self.constants.to_record(self.F, sympy.Symbol(f"x{self.pivot}"))


@dataclass(frozen=True)
class HeightCertificate:
    """
    c1, c2 such that every point of X^oa in V with D(V) > c2 has height_n at most c1.

    c1 also covers the bounded-degree case D(V) <= c2 through the descent
    to e_H^{-1}(X cap H), so it bounds X^oa cap V for every V of the signature.
    """

    variety: AmbientVariety
    signature: Signature
    c1: mpf
    c2: mpf
    c3: mpf
    c4: mpf
    M: int
    constants_used: tuple[ProjectionConstants, ...] = ()
    provenance: tuple[ProvenanceEntry, ...] = ()
    gates: GateReport = field(default_factory=GateReport)

    def to_record(self) -> CertificateRecord:
        return CertificateRecord(
            X_id=self.variety.name,
            signature=self.signature.to_dict(),
            c1=float(self.c1),
            c2=float(self.c2),
            c3=float(self.c3),
            c4=float(self.c4),
            M=self.M,
            constants_used=[used.to_record() for used in self.constants_used],
            provenance=list(self.provenance),
        )


def _note(provenance: list, constant: str, formula: str, value=0) -> None:
    provenance.append(ProvenanceEntry(constant=constant, formula=formula, value=float(value)))


def _check_complementary(variety: AmbientVariety, signature: Signature) -> None:
    if signature.n != variety.n:
        raise ConfigError(f"signature lives in (P^1)^{signature.n}, X in (P^1)^{variety.n}")
    if signature.codim != variety.dim_hint:
        raise ConfigError(
            f"signature has codimension {signature.codim} but X has dimension {variety.dim_hint};"
            " the two must be complementary"
        )


def finite_height_bound(variety: AmbientVariety) -> Optional[mpf]:
    """
    Upper bound for height_n on a finite X: sum over coordinates of log ||E_i||_2.

    E_i is the primitive integer eliminant of x_i; h(a) <= log M(E_i) <= log ||E_i||_2
    by Landau's inequality. Returns None when some coordinate is unconstrained.
    """
    symbols = variety.symbols
    total = mpf(0)
    with mpmath.workprec(settings.PRECISION_BITS):
        for s in symbols:
            e = eliminant(variety.equations, symbols, s)
            if e is None:
                return None
            if e.degree() <= 0:
                return mpf(0)
            primitive = integer_min_poly(Poly(e.as_expr().subs(s, GEN), GEN, domain=QQ))
            norm = mpmath.sqrt(mpmath.fsum(mpf(int(c)) ** 2 for c in primitive.all_coeffs()))
            total += mpmath.log(norm)
    return total


def structure_constant(gates: GateReport) -> mpf:
    """c5: the largest multiplier 2 D_j of the canonical-height bound over every projection F^J and every pivot in J."""
    best = mpf(0)
    for F in gates.projections.values():
        for pivot in F.gens:
            coefficients = canonical_bound_coefficients(F, pivot)
            best = max([best] + [mpf(v) for v in coefficients.values()])
    return best


def _degree_bound(n: int, c5: mpf) -> int:
    return int(mpmath.floor(n * n * c5)) + 1


def certificate(
    variety: AmbientVariety,
    signature: Signature,
    f: Poly,
    k_max: Optional[int] = None,
    depth: int = 0,
) -> HeightCertificate:
    """
    Assemble c1, c2 for X and the signature of V.

    Every chain k contributes the projection F^{Gamma_k}, Gamma_k the non-tail
    coordinates plus the tail of chain k, pivoted at that tail. With c3 the
    largest multiplier and c4 the largest C5 among them, c2 = 2 n^2 c3 and
    sum_i h_hat(a_i) <= 2 n c4 + c4 / c3 once D(V) >= c2; converting back
    with h <= h_hat + C4 gives c1. Periodic varieties with D(V) <= c2 are
    covered by descending to the hypersurface x_tail = g(x_prev) for every
    commuter g of degree at most c2.

    Raises:
        NotDisintegratedError: If f is a power or Chebyshev map
        XoaEmptyError: If X fails an anomaly gate or lies in a periodic hypersurface
        ConfigError: If the signature is not complementary to X
    """
    require_disintegrated(f)
    _check_complementary(variety, signature)
    gates = check_gates(variety, f, k_max)
    n, r = variety.n, variety.dim_hint
    C4 = canonical_difference_constant(f)
    provenance: list[ProvenanceEntry] = []
    _note(provenance, "C4(f)", f"C_f/(d-1) for f={format_poly(f)}", C4)

    if r == 0:
        base = finite_height_bound(variety)
        if base is None:
            raise ConfigError(f"{variety.name} has dimension hint 0 but is not finite")
        _note(provenance, "c1", "sum_i log ||E_i||_2 over the primitive eliminants of a finite X", base)
        c3 = mpf(1)
        c2 = mpf(2 * n * n)
        _note(provenance, "c2", "2 n^2 with c3 = 1; the threshold is vacuous for a finite X", c2)
        return HeightCertificate(variety, signature, base, c2, c3, base, 1, (), tuple(provenance), gates)

    used = []
    for tail in signature.tails:
        J = tuple(sorted(signature.dominated + (tail,)))
        F = gates.projection(J)
        used.append(ProjectionConstants(J, tail, F, inequality_constants(F, f, variety.symbols[tail - 1])))

    with mpmath.workprec(settings.PRECISION_BITS):
        c3 = max(max((mpf(v) for v in pc.constants.coefficients.values()), default=mpf(0)) for pc in used)
        c4 = max(pc.constants.C5 for pc in used)
        c2 = 2 * n * n * c3
        c1_large = 2 * n * c4 + (c4 / c3 if c3 > 0 else c4) + n * C4
    _note(provenance, "c3", f"max 2D_j over F^Gamma_k, Gamma={list(signature.dominated)}", c3)
    _note(provenance, "c4", "max C5 over the same projections", c4)
    _note(provenance, "c2", "2 n^2 c3", c2)
    _note(provenance, "c1[D(V)>c2]", "2 n c4 + c4/c3 + n C4(f), h_hat converted to h", c1_large)

    lifted = _bounded_degree_bound(variety, signature, f, c2, k_max, depth, provenance)
    c1 = max(c1_large, lifted)
    _note(provenance, "c1", "max of the large-degree bound and the lifted bounded-degree bounds", c1)

    c5 = structure_constant(gates)
    M = _degree_bound(n, c5)
    _note(provenance, "M", f"floor(n^2 c5) + 1 with c5={float(c5):.6g}", M)

    logger.info(
        "📜 Certificate assembled",
        extra={"variety": variety.name, "signature": str(signature), "c1": float(c1), "c2": float(c2), "depth": depth},
    )
    return HeightCertificate(variety, signature, c1, c2, c3, c4, M, tuple(used), tuple(provenance), gates)


def _bounded_degree_bound(
    variety: AmbientVariety,
    signature: Signature,
    f: Poly,
    c2: mpf,
    k_max: Optional[int],
    depth: int,
    provenance: list,
) -> mpf:
    chains = [chain for chain in signature.chains if len(chain) >= 2]
    if not chains:
        _note(provenance, "descent", "every chain has length 1, D(V) is infinite")
        return mpf(0)

    commuters = commuters_up_to(f, max(1, int(mpmath.floor(c2))), k_max)
    if any(not c.is_rational for c in commuters):
        _note(provenance, "descent", "graphs over Q(zeta) pulled back through the norm to Q")
    _note(provenance, "descent", f"minimal commuter search: {MINIMAL_COMMUTER_SEARCH}")
    best = mpf(0)
    for chain in chains:
        tail, previous = chain[-1], chain[-2]
        for commuter in commuters:
            label = _commuter_graph(tail, commuter, previous)
            g = commuter.zeta_poly()
            embedding = embed_in_hypersurface(variety.n, (tail, previous, g), commuter.zeta_order)
            pulled = embedding.pull_back(variety.equations)

            if not pulled:
                if depth == 0:
                    raise XoaEmptyError(f"{variety.name} lies in the periodic hypersurface {label}")
                _note(provenance, "descent", f"{label}: X inside H, anomalous")
                continue
            if any(p.is_ground for p in pulled):
                _note(provenance, "descent", f"{label}: X cap H is empty")
                continue

            sub = AmbientVariety(variety.n - 1, tuple(pulled), variety.dim_hint - 1, f"{variety.name}|{label}")
            try:
                inner = certificate(sub, signature.without(tail), f, k_max, depth + 1)
            except XoaEmptyError as e:
                _note(provenance, "descent", f"{label}: {e.reason}")
                continue
            except (ConfigError, AnomalousFiberError):
                _note(provenance, "descent", f"{label}: X cap H has excess dimension, anomalous")
                continue

            with mpmath.workprec(settings.PRECISION_BITS):
                lifted = (1 + commuter.degree) * inner.c1 + upper_height_constant(g, commuter.zeta_order)
            _note(provenance, "descent", f"{label}: (1 + deg g) c1' + C1(g) with c1'={float(inner.c1):.6g}", lifted)
            best = max(best, lifted)
    return best


@dataclass(frozen=True)
class StructureBound:
    """M and the finite collection of periodic hypersurfaces for the structure theorem."""

    M: int
    c5: mpf
    hypersurfaces: tuple[str, ...]
    linear_hypersurfaces: tuple[str, ...]
    infinity_families: tuple[str, ...]
    constant_families: tuple[str, ...]
    vanishing_systems: tuple[dict, ...]
    provenance: tuple[ProvenanceEntry, ...] = ()

    def to_record(self) -> StructureRecord:
        return StructureRecord(
            M=self.M,
            c5=float(self.c5),
            hypersurfaces=list(self.hypersurfaces),
            linear_hypersurfaces=list(self.linear_hypersurfaces),
            infinity_families=list(self.infinity_families),
            constant_families=list(self.constant_families),
            vanishing_systems=list(self.vanishing_systems),
        )


def _commuter_graph(j: int, commuter: Commuter, k: int) -> str:
    if commuter.poly is not None:
        return graph_text(j, commuter.poly, k)
    body = sympy.sstr(commuter.expr.subs(GEN, sympy.Symbol(f"x{k}"))).replace("**", "^")
    return f"x{j}={body}"


def structure_degree_bound(variety: AmbientVariety, f: Poly, k_max: Optional[int] = None) -> StructureBound:
    """
    M = floor(n^2 c5) + 1 and the hypersurfaces x_j = g(x_k) with 2 <= deg g <= M.

    Linear commuters give the hypersurfaces listed separately; the families
    x_i = inf and x_i = zeta (zeta periodic) and the coefficient-vanishing
    systems of every projection complete the data. Depends only on X and f.

    Raises:
        XoaEmptyError: If X fails an anomaly gate
    """
    require_disintegrated(f)
    gates = check_gates(variety, f, k_max)
    n = variety.n
    c5 = structure_constant(gates)
    M = _degree_bound(n, c5)
    provenance = [
        ProvenanceEntry(constant="c5", formula="max 2D_j over every F^J and pivot", value=float(c5)),
        ProvenanceEntry(constant="M", formula="floor(n^2 c5) + 1", value=float(M)),
        ProvenanceEntry(
            constant="c7",
            formula="absorbed by normalizing h_hat(zeta)/B < 1; h_hat used throughout with C4 conversions",
            value=0.0,
        ),
    ]

    commuters = commuters_up_to(f, M, k_max)
    nonlinear, linear = [], []
    for j, k in itertools.permutations(range(1, n + 1), 2):
        for commuter in commuters:
            (linear if commuter.is_linear else nonlinear).append(_commuter_graph(j, commuter, k))

    systems = []
    for J, F in sorted(gates.projections.items()):
        for pivot in J:
            equations = coefficient_vanishing_system(F, variety.symbols[pivot - 1])
            systems.append({"J": list(J), "pivot": f"x{pivot}", "equations": [format_poly(p) for p in equations]})

    logger.info("🧭 Structure bound computed", extra={"variety": variety.name, "M": M, "hypersurfaces": len(nonlinear)})
    return StructureBound(
        M,
        c5,
        tuple(nonlinear),
        tuple(linear),
        tuple(f"x{i}=inf" for i in range(1, n + 1)),
        tuple(f"x{i}=zeta, zeta f-periodic" for i in range(1, n + 1)),
        tuple(systems),
        tuple(provenance),
    )


@dataclass(frozen=True)
class IntersectionSample:
    """Exact points of X cap V with their heights; canonical heights are listed per coordinate."""

    V: PeriodicSubvariety
    points: tuple[tuple[P1Point, ...], ...] = ()
    heights: tuple[HeightValue, ...] = ()
    canonical_heights: tuple[tuple[HeightValue, ...], ...] = ()


def _canonical(f: Poly, a: AlgebraicNumber, target_error: Optional[float]) -> HeightValue:
    try:
        return canonical_height(f, a, target_error)
    except IterateTooLargeError as e:
        logger.warning("Canonical height kept at its best estimate", extra={"point": str(a)})
        return e.best_estimate


def sample_intersection(
    variety: AmbientVariety,
    V: PeriodicSubvariety,
    budget: int,
    target_error: Optional[float] = None,
) -> IntersectionSample:
    """
    Up to ``budget`` exact points of (X cap A^n) cap V.

    The chain relations and rational constants of V are substituted into X;
    irrational constants stay as unknowns pinned by their minimal polynomials,
    and so does ZETA for generators over Q(zeta), keeping only solutions at the
    designated root exp(2*pi*i/zeta_order).
    The zero-dimensional system in the chain heads is solved exactly and the
    remaining coordinates are recovered along the chains.

    Raises:
        ConfigError: If dim X + dim V != n
        AnomalousFiberError: If the reduced system is positive-dimensional
    """
    if V.n != variety.n or variety.dim_hint + V.dimension != variety.n:
        raise ConfigError(
            f"X (dim {variety.dim_hint}) and V (dim {V.dimension}) are not complementary in (P^1)^{variety.n}"
        )
    if any(zeta.is_infinity for zeta in V.constants.values()):
        return IntersectionSample(V)

    symbols = variety.symbols
    substitution = {}
    unknowns = []
    pinned = []
    irrational = {}
    for i, zeta in V.constants.items():
        q = zeta.value.rational
        if q is not None:
            substitution[symbols[i - 1]] = q
        else:
            unknowns.append(i)
            pinned.append(zeta.value.min_poly.as_expr().subs(GEN, symbols[i - 1]))
            irrational[i] = zeta.value
    for chain in V.signature.chains:
        head = symbols[chain[0] - 1]
        unknowns.append(chain[0])
        for j in chain[1:]:
            substitution[symbols[j - 1]] = V.chain_map(j).as_expr().subs(GEN, head)
    unknowns.sort()

    equations = [sympy.expand(p.as_expr().subs(substitution, simultaneous=True)) for p in variety.equations]
    if any(e.is_number and e != 0 for e in equations):
        return IntersectionSample(V)
    system = [e for e in equations if e != 0] + pinned
    variables = [symbols[i - 1] for i in unknowns]
    designated = None
    if V.uses_zeta:
        system.append(cyclotomic(V.zeta_order).as_expr())
        variables.append(ZETA)
        designated = root_of_unity(1, V.zeta_order)
    solutions = solve_zero_dimensional(system, variables)

    points, heights, hats = [], [], []
    for solution in solutions:
        if len(points) >= budget:
            break
        values = dict(zip(unknowns, solution))
        if any(values[i] != constant for i, constant in irrational.items()):
            continue
        if designated is not None and solution[-1] != designated:
            continue
        for i, zeta in V.constants.items():
            values.setdefault(i, zeta.value)
        for chain in V.signature.chains:
            for previous, j in zip(chain, chain[1:]):
                values[j] = apply_generator(V.generators[j], P1Point(values[previous]), V.zeta_order).value

        point = tuple(P1Point(values[i]) for i in range(1, variety.n + 1))
        canonical = {}
        for chain in V.signature.chains:
            head_height = _canonical(V.f, values[chain[0]], target_error)
            for j in chain:
                canonical[j] = head_height.scaled(V.chain_map(j).degree()) if j != chain[0] else head_height
        for i in V.constants:
            canonical[i] = HeightValue.zero()

        points.append(point)
        heights.append(height_n(point))
        hats.append(tuple(canonical[i] for i in range(1, variety.n + 1)))

    logger.debug("Intersection sampled", extra={"V": str(V), "points": len(points)})
    return IntersectionSample(V, tuple(points), tuple(heights), tuple(hats))


def passes_gate(cert: HeightCertificate, point: Sequence[P1Point]) -> bool:
    """The coefficient-vanishing gate for every projection the certificate used."""
    for used in cert.constants_used:
        others = {j: point[j - 1] for j in used.J if j != used.pivot}
        if not coefficient_vanishing_check(used.F, sympy.Symbol(f"x{used.pivot}"), others):
            return False
    return True


def periodic_constants(f: Poly, period_max: Optional[int] = None) -> list[P1Point]:
    """Distinct roots of f^p(x) - x for p = 1..period_max."""
    found: list[AlgebraicNumber] = []
    for p in range(1, (period_max or settings.SAMPLE_PERIOD_MAX) + 1):
        for root in distinct_roots(poly_iterate(f, p) - identity()):
            if all(root != other for other in found):
                found.append(root)
    return [P1Point(root) for root in found]


def _variety_key(V: PeriodicSubvariety) -> tuple:
    relations = frozenset(format_poly(r.monic()) for r in V.relations())
    constants = tuple(sorted((i, str(zeta)) for i, zeta in V.constants.items()))
    return relations, constants


def candidate_varieties(
    f: Poly,
    signatures: Sequence[Signature],
    constants: Sequence[P1Point],
    generators: Sequence[Poly],
    limit: Optional[int] = None,
    k_max: Optional[int] = None,
    zeta_order: int = 1,
) -> list[PeriodicSubvariety]:
    """Periodic varieties with the given signatures, constants and generators, deduplicated, in a fixed order."""
    limit = limit or settings.MAX_VARIETIES
    seen = set()
    found = []
    for signature in signatures:
        positions = [j for chain in signature.chains for j in chain[1:]]
        for zetas in itertools.product(constants, repeat=len(signature.fixed)):
            for chosen in itertools.product(generators, repeat=len(positions)):
                V = build_periodic(
                    signature,
                    dict(zip(signature.fixed, zetas)),
                    dict(zip(positions, chosen)),
                    f,
                    k_max=k_max,
                    zeta_order=zeta_order,
                )
                key = _variety_key(V)
                if key in seen:
                    continue
                seen.add(key)
                found.append(V)
                if len(found) >= limit:
                    return found
    return found


def periodic_candidates(
    f: Poly, n: int, codim: int, max_gen_deg: int, k_max: Optional[int] = None, limit: Optional[int] = None
) -> list[PeriodicSubvariety]:
    """
    Periodic varieties of codimension ``codim`` in (P^1)^n built from the periodic
    constants of f and every commuter of degree <= max_gen_deg, irrational ones included.

    Raises:
        NotDisintegratedError: If f is conjugate to a power map or a Chebyshev polynomial
    """
    require_disintegrated(f)
    commuters = commuters_up_to(f, max_gen_deg, k_max)
    return candidate_varieties(
        f,
        enumerate_signatures(n, codim),
        periodic_constants(f),
        [c.zeta_poly() for c in commuters],
        limit,
        k_max,
        commuters[0].zeta_order,
    )


@dataclass(frozen=True)
class VarietyOutcome:
    """Sampled points of X cap V sorted into passing, violating and anomalous."""

    variety: str
    samples: tuple[PointRecord, ...] = ()
    violations: tuple[PointRecord, ...] = ()
    anomalous: tuple[PointRecord, ...] = ()
    note: str = ""


def verify_variety(
    variety: AmbientVariety,
    V: PeriodicSubvariety,
    cert: HeightCertificate,
    budget: int,
    target_error: Optional[float] = None,
) -> VarietyOutcome:
    """Sample X cap V and compare every point passing the gate against c1."""
    try:
        sample = sample_intersection(variety, V, budget, target_error)
    except AnomalousFiberError as e:
        return VarietyOutcome(str(V), note=f"anomalous fiber: {e}")

    samples, violations, anomalous = [], [], []
    for point, height, hats in zip(sample.points, sample.heights, sample.canonical_heights):
        gate = passes_gate(cert, point)
        record = PointRecord(
            variety=str(V),
            point=[str(p) for p in point],
            D_V=V.D_V.value,
            coordinates=[p.to_dict() for p in point],
            height=height.to_record(),
            canonical_heights=[h.to_record() for h in hats],
            gate_passed=gate,
        )
        samples.append(record)
        if not gate:
            anomalous.append(record)
        elif height.lower > cert.c1:
            violations.append(record)
    return VarietyOutcome(str(V), tuple(samples), tuple(violations), tuple(anomalous))


@dataclass(frozen=True)
class VerificationResult:
    certificates: tuple[HeightCertificate, ...]
    outcomes: tuple[VarietyOutcome, ...]

    @property
    def samples(self) -> list[PointRecord]:
        return [r for o in self.outcomes for r in o.samples]

    @property
    def violations(self) -> list[PointRecord]:
        return [r for o in self.outcomes for r in o.violations]

    @property
    def anomalous(self) -> list[PointRecord]:
        return [r for o in self.outcomes for r in o.anomalous]

    @property
    def statistics(self) -> dict[str, int]:
        return {
            "signatures": len(self.certificates),
            "varieties": len(self.outcomes),
            "samples": len(self.samples),
            "violations": len(self.violations),
            "anomalous": len(self.anomalous),
            "anomalous_fibers": sum(1 for o in self.outcomes if o.note),
        }


def _graph_and_diagonal(f: Poly, n: int, name: str) -> AmbientVariety:
    """x2 = f(x1) together with x_n = x_{n-1}."""
    gens = coordinate_symbols(n)
    graph = Poly(gens[1] - f.as_expr().subs(GEN, gens[0]), *gens, domain=QQ)
    diagonal = Poly(gens[n - 1] - gens[n - 2], *gens, domain=QQ)
    return AmbientVariety(n, (graph, diagonal), n - 2, name)


def example_variety(example_id: int, f: Poly, m: int) -> tuple[AmbientVariety, PeriodicSubvariety]:
    """
    The curve-containing X and the periodic V_m of the unbounded-height examples.

    Family 1: X = {x2 = f(x1), x5 = x4}, V_m: x2 = f(x1), x3 = f(x2), x4 = f^m(x3).
    Family 2: X = {x2 = f(x1), x4 = x3}, V_m: x2 = f(x1), x3 = f^m(x2).
    """
    if example_id == 1:
        X_ = _graph_and_diagonal(f, 5, "example 1")
        signature = Signature(5, (), ((1, 2, 3, 4), (5,)))
        generators = {2: f, 3: f, 4: poly_iterate(f, m)}
    elif example_id == 2:
        X_ = _graph_and_diagonal(f, 4, "example 2")
        signature = Signature(4, (), ((1, 2, 3), (4,)))
        generators = {2: f, 3: poly_iterate(f, m)}
    else:
        raise ConfigError(f"unknown example {example_id}; expected 1 or 2")
    return X_, build_periodic(signature, {}, generators, f)


def certify_seed(f: Poly, seed: str | P1Point) -> AlgebraicNumber:
    """
    The seed of a growth experiment, with h_hat_f(seed) > 0 certified.

    Raises:
        PreperiodicSeedError: If the seed is infinite, preperiodic, or its
            canonical height cannot be bounded away from zero
    """
    point = parse_point(seed) if isinstance(seed, str) else seed
    if point.is_infinity:
        raise PreperiodicSeedError("the seed infinity is fixed by f")
    structure = preperiodic_structure(f, point)
    if structure is not None:
        raise PreperiodicSeedError(f"seed {point} is preperiodic (preperiod {structure[0]}, period {structure[1]})")
    h = _canonical(f, point.value, None)
    if h.lower <= 0:
        raise PreperiodicSeedError(f"could not certify h_hat({point}) > 0")
    return point.value


def growth_row(example_id: int, f: Poly, seed: AlgebraicNumber, m: int) -> GrowthRow:
    """One row of the growth table: the point of X cap V_m over the seed and its height."""
    orbit = [seed]
    for _ in range(m + 2):
        orbit.append(algebraic_eval(f, orbit[-1]))
    if example_id == 1:
        values = (orbit[0], orbit[1], orbit[2], orbit[m + 2], orbit[m + 2])
    else:
        values = (orbit[0], orbit[1], orbit[m + 1], orbit[m + 1])
    point = tuple(P1Point(a) for a in values)

    if seed.is_rational:
        X_, V = example_variety(example_id, f, m)
        if not (X_.contains(point) and membership(V, point)):
            raise RuntimeError(f"growth point for m={m} left X cap V_m")
    h = height_n(point)
    return GrowthRow(
        m=m,
        point=[str(p) for p in point],
        height=float(h.value),
        radius=float(h.error_radius),
        exact=h.exact,
        iterations=m + 2,
        max_orbit_height=float(max(weil_height(a).upper for a in orbit)),
        max_value_degree=max(a.degree for a in orbit),
    )


class BoundsService:
    """Runs the bounded-height experiments, fanning independent pieces out over worker processes."""

    def __init__(self, jobs: Optional[int] = None):
        self.jobs = jobs or settings.jobs

    async def _map(self, func, argument_lists: list[tuple]) -> list:
        if self.jobs <= 1 or len(argument_lists) <= 1:
            return [func(*args) for args in argument_lists]
        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=self.jobs) as pool:
            tasks = [loop.run_in_executor(pool, func, *args) for args in argument_lists]
            return list(await asyncio.gather(*tasks))

    async def verify_bounded(
        self,
        variety: AmbientVariety,
        f: Poly,
        codim: int,
        max_gen_deg: int = 16,
        budget: int = 64,
        k_max: Optional[int] = None,
        target_error: Optional[float] = None,
        include_large_degree: bool = False,
    ) -> VerificationResult:
        """
        Check sampled points of X cap V against the certificate for every periodic V of codimension ``codim``.

        Generators are the commuters of degree <= max_gen_deg, those over Q(zeta)
        included; with ``include_large_degree`` the smallest commuter degree above
        every c2 is added to represent the D(V) > c2 regime.

        Raises:
            XoaEmptyError: If X fails an anomaly gate; every bound then holds vacuously
            ConfigError: If codim differs from dim X
        """
        require_disintegrated(f)
        if codim != variety.dim_hint:
            raise ConfigError(f"codim {codim} must equal the dimension {variety.dim_hint} of X")

        logger.info("🔍 Phase 1: anomaly gates", extra={"variety": variety.name, "n": variety.n})
        check_gates(variety, f, k_max)

        signatures = enumerate_signatures(variety.n, codim)
        logger.info("📜 Phase 2: certificates", extra={"signatures": len(signatures)})
        certificates = await self._map(certificate, [(variety, s, f, k_max) for s in signatures])
        by_signature = {c.signature: c for c in certificates}

        commuters = commuters_up_to(f, max_gen_deg, k_max)
        generators = [c.zeta_poly() for c in commuters]
        if include_large_degree:
            threshold = int(max(c.c2 for c in certificates))
            above = [c for c in commuters_up_to(f, 2 * threshold * f.degree() + 1, k_max) if c.degree > threshold]
            if above:
                generators.append(min(above, key=lambda c: c.degree).zeta_poly())
        constants = periodic_constants(f)
        varieties = candidate_varieties(
            f, signatures, constants, generators, k_max=k_max, zeta_order=commuters[0].zeta_order
        )
        logger.info("🔁 Phase 3: periodic varieties", extra={"varieties": len(varieties), "generators": len(generators)})

        outcomes = await self._map(
            verify_variety, [(variety, V, by_signature[V.signature], budget, target_error) for V in varieties]
        )
        result = VerificationResult(tuple(certificates), tuple(outcomes))
        logger.info("✅ Phase 4: sampling complete", extra=result.statistics)
        return result

    async def reproduce_example(
        self, example_id: int, f: Poly, m_range: Sequence[int], seed_point: str | P1Point = "1"
    ) -> GrowthTable:
        """
        Heights of the points over a non-preperiodic seed on X cap V_m, one row per m.

        Raises:
            PreperiodicSeedError: If h_hat of the seed is not certified positive
            ConfigError: On an unknown example or an empty m range
        """
        require_disintegrated(f)
        lo, hi = m_range
        if lo < 1 or hi < lo:
            raise ConfigError(f"m range must satisfy 1 <= lo <= hi, got {list(m_range)}")
        if example_id not in (1, 2):
            raise ConfigError(f"unknown example {example_id}; expected 1 or 2")

        logger.info("🌱 Certifying seed", extra={"seed": str(seed_point), "example": example_id})
        seed = certify_seed(f, seed_point)
        rows = await self._map(growth_row, [(example_id, f, seed, m) for m in range(lo, hi + 1)])
        logger.info("📈 Growth table ready", extra={"rows": len(rows)})
        return GrowthTable(
            example_id=example_id,
            f=format_poly(f),
            seed_point=str(seed),
            growth_constant=float(height_expansion_constant(f)),
            rows=sorted(rows, key=lambda row: row.m),
        )


def verify_bounded(
    variety: AmbientVariety,
    f: Poly,
    codim: int,
    max_gen_deg: int = 16,
    budget: int = 64,
    k_max: Optional[int] = None,
    jobs: Optional[int] = None,
    **options,
) -> VerificationResult:
    return asyncio.run(BoundsService(jobs).verify_bounded(variety, f, codim, max_gen_deg, budget, k_max, **options))


def reproduce_example(
    example_id: int, f: Poly, m_range: Sequence[int], seed_point: str | P1Point = "1", jobs: Optional[int] = None
) -> GrowthTable:
    return asyncio.run(BoundsService(jobs).reproduce_example(example_id, f, m_range, seed_point))
