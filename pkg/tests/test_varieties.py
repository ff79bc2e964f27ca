import pytest
import sympy
from sympy import QQ, Poly

from src.algebra.algebraic import P1Point, algebraic_combine, parse_point, root_of_unity
from src.algebra.polynomials import X, ZETA, parse_poly
from src.exceptions import NonCommuterError, NonPeriodicConstantError, PolynomialParseError
from src.geometry.signatures import Signature
from src.geometry.varieties import (
    AmbientVariety,
    DVValue,
    SpecialSubvariety,
    build_periodic,
    embed_in_hypersurface,
    graph_embedding,
    graph_text,
    membership,
)


def _points(*values):
    return tuple(P1Point.finite(v) for v in values)


def test_ambient_variety_from_strings(line):
    assert line.n == 2
    assert line.dim_hint == 1
    assert line.contains([1, 2])
    assert not line.contains([1, 3])
    assert not line.contains([P1Point.infinity(), 1])


def test_ambient_variety_reports_the_bad_equation():
    with pytest.raises(PolynomialParseError) as info:
        AmbientVariety.from_strings(["x1-x2", "x1+w"], 2)
    assert info.value.line == 2


def test_ambient_variety_validation():
    with pytest.raises(ValueError):
        AmbientVariety.from_strings(["x1-x2"], 2, dim_hint=2)
    with pytest.raises(ValueError):
        AmbientVariety(2, (), 1)


def test_contains_checks_arity(line):
    with pytest.raises(ValueError):
        line.contains([1])


def test_graph_of_f(f, graph_signature):
    V = build_periodic(graph_signature, {}, {2: f}, f)
    assert str(V.D_V) == "2"
    assert V.witnesses == {2: 1}
    assert membership(V, [1, 2])
    assert not membership(V, [1, 3])
    assert str(V) == "x2=x1^2 + 1"
    assert V.cycle_length == 1


def test_graph_membership_at_infinity(f, graph_signature):
    V = build_periodic(graph_signature, {}, {2: f}, f)
    assert V.contains([P1Point.infinity(), P1Point.infinity()])
    assert not V.contains([P1Point.infinity(), 1])


def test_chain_map_composes_generators(f):
    signature = Signature(3, (), ((1, 2, 3),))
    V = build_periodic(signature, {}, {2: f, 3: f}, f)
    assert V.chain_map(3) == parse_poly("x^4+2x^2+2")
    assert V.chain_map(1) == parse_poly("x")
    assert V.D_V == DVValue(2)
    x1, x2, x3 = sympy.symbols("x1:4")
    assert [r.as_expr() for r in V.relations()] == [x2 - x1**2 - 1, x3 - x2**2 - 1]


def test_periodic_constant(f):
    zeta = parse_point("x^2-x+1@0.5,0.87")
    V = build_periodic(Signature(1, (1,), ()), {1: zeta}, {}, f)
    assert V.periods == {1: 1}
    assert V.D_V.is_infinite
    assert V.contains([zeta])


def test_infinity_is_a_periodic_constant(f):
    V = build_periodic(Signature(2, (1,), ((2,),)), {1: P1Point.infinity()}, {}, f)
    assert V.periods == {1: 1}


def test_non_periodic_constant(f):
    with pytest.raises(NonPeriodicConstantError) as info:
        build_periodic(Signature(1, (1,), ()), {1: 1}, {}, f)
    assert info.value.orbit_prefix[:3] == ["1", "2", "5"]


def test_non_commuting_generator(f, graph_signature):
    with pytest.raises(NonCommuterError):
        build_periodic(graph_signature, {}, {2: parse_poly("x+1")}, f)


def test_mismatched_defining_data(f, graph_signature):
    with pytest.raises(ValueError, match="generators"):
        build_periodic(graph_signature, {}, {}, f)
    with pytest.raises(ValueError, match="constants"):
        build_periodic(graph_signature, {1: 0}, {2: f}, f)


def test_product_of_lines_has_infinite_dv(f):
    V = build_periodic(Signature(2, (), ((1,), (2,))), {}, {}, f)
    assert str(V.D_V) == "inf"
    assert V.D_V.exceeds(10**6)
    assert V.to_dict()["D_V"] == "inf"


def test_linear_chain_canonicalizes(odd_cubic):
    forward = build_periodic(Signature(2, (), ((2, 1),)), {}, {1: parse_poly("-x")}, odd_cubic)
    assert forward.canonical().chains == ((1, 2),)


def test_special_subvariety(f, graph_signature):
    periodic = build_periodic(Signature(1, (), ((1,),)), {}, {}, f)
    Z = SpecialSubvariety(2, {1: P1Point.finite(7)}, periodic)
    assert Z.free_coordinates == [2]
    assert Z.contains([7, 123])
    assert not Z.contains([6, 123])
    with pytest.raises(ValueError):
        SpecialSubvariety(2, {1: P1Point.finite(7)})


def test_graph_text(f):
    assert graph_text(2, f, 1) == "x2=x1^2 + 1"
    assert graph_text(1, parse_poly("x"), 2) == "x1=x2"


def test_embedding_of_constant_hypersurface():
    e = embed_in_hypersurface(2, (1, 3))
    assert e.apply([5]) == _points(3, 5)
    x1, x2 = sympy.symbols("x1 x2")
    assert e.hypersurface().as_expr() == x1 - 3


def test_embedding_of_graph(f):
    assert embed_in_hypersurface(2, (2, 1, f)).apply([1]) == _points(1, 2)
    assert embed_in_hypersurface(3, (1, 2, f)).apply([2, 7]) == _points(5, 2, 7)


def test_embedding_rejects_bad_indices(f):
    with pytest.raises(ValueError):
        embed_in_hypersurface(2, (2, 2, f))
    with pytest.raises(ValueError):
        embed_in_hypersurface(2, (3, 0))


def test_pull_back_through_graph(f, line):
    e = embed_in_hypersurface(2, (2, 1, f))
    assert e.pull_back(line.equations) == [parse_poly("x1^2-x1")]
    pulled = e.pull_back_variety(line)
    assert pulled.n == 1 and pulled.dim_hint == 0


def test_pull_back_through_constant(line):
    e = embed_in_hypersurface(2, (1, 0))
    assert e.pull_back(line.equations) == [parse_poly("x1-1")]


def test_pull_back_drops_vanishing_equations(diagonal):
    e = embed_in_hypersurface(2, (2, 1, parse_poly("x")))
    assert e.pull_back(diagonal.equations) == []


def test_pull_back_through_irrational_constant(line):
    e = embed_in_hypersurface(2, (1, parse_point("x^2-2@1.41")))
    with pytest.raises(ValueError):
        e.pull_back(line.equations)


def test_graph_embedding_lands_in_the_variety(f, graph_signature):
    V = build_periodic(graph_signature, {}, {2: f}, f)
    e = graph_embedding(V, 2)
    assert V.contains(e.apply([3]))
    assert e.to_dict() == {"equation": "x2=x1^2 + 1"}


@pytest.fixture
def gaussian_rotation():
    """x -> i*x with i = exp(2*pi*I/4) written as ZETA."""
    return Poly(ZETA * X, X, ZETA, domain=QQ)


def test_pull_back_through_a_graph_over_the_gaussian_field(gaussian_rotation):
    x1, x2 = sympy.symbols("x1 x2")
    e = embed_in_hypersurface(2, (2, 1, gaussian_rotation), 4)
    # (1 + i) x1 - 3 times its conjugate
    assert e.pull_back([Poly(x1 + x2 - 3, x1, x2, domain=QQ)]) == [parse_poly("2*x1^2 - 6*x1 + 9")]
    assert e.pull_back([Poly(x2**2 + x1**2, x1, x2, domain=QQ)]) == []
    assert e.to_dict()["zeta"] == "exp(2*pi*I/4)"


def test_pull_back_over_the_gaussian_field_detects_empty_intersections(gaussian_rotation):
    x1, x2 = sympy.symbols("x1 x2")
    e = embed_in_hypersurface(2, (2, 1, gaussian_rotation), 4)
    constant = e.pull_back([Poly(x2**2 + x1**2 + 1, x1, x2, domain=QQ)])
    assert len(constant) == 1 and constant[0].is_ground


def test_graph_over_the_gaussian_field(gaussian_rotation):
    quintic = parse_poly("x^5+x")
    V = build_periodic(Signature(2, (), ((1, 2),)), {}, {2: gaussian_rotation}, quintic, k_max=2, zeta_order=4)
    i = root_of_unity(1, 4)
    assert V.uses_zeta
    assert V.witnesses == {2: 1}
    assert V.D_V.value == 1
    assert V.contains([P1Point.finite(1), P1Point.finite(i)])
    assert not V.contains([P1Point.finite(1), P1Point.finite(root_of_unity(3, 4))])
    assert ZETA in V.relations()[0].gens
    assert V.to_dict()["zeta"] == "exp(2*pi*I/4)"
    assert graph_embedding(V, 2).apply([2]) == (P1Point.finite(2), P1Point.finite(algebraic_combine(i, i, "+")))


def test_gaussian_generator_must_commute():
    with pytest.raises(NonCommuterError):
        build_periodic(
            Signature(2, (), ((1, 2),)),
            {},
            {2: Poly(ZETA * X + 1, X, ZETA, domain=QQ)},
            parse_poly("x^5+x"),
            k_max=2,
            zeta_order=4,
        )
