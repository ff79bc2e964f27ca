import pytest
import sympy

from src.algebra.polynomials import parse_poly
from src.config import settings
from src.geometry.signatures import Signature
from src.geometry.varieties import AmbientVariety


@pytest.fixture(autouse=True)
def restore_settings():
    """Experiments write the run seed into the global settings."""
    saved = settings.model_dump()
    yield
    for key, value in saved.items():
        setattr(settings, key, value)


@pytest.fixture
def f():
    return parse_poly("x^2+1")


@pytest.fixture
def odd_cubic():
    return parse_poly("x^3+x")


@pytest.fixture
def line():
    """X: x2 = x1 + 1 in (P^1)^2."""
    return AmbientVariety.from_strings(["x2-x1-1"], 2, name="line")


@pytest.fixture
def diagonal():
    return AmbientVariety.from_strings(["x2-x1"], 2, name="diagonal")


@pytest.fixture
def graph_signature():
    return Signature(2, (), ((1, 2),))


@pytest.fixture
def xs():
    return sympy.symbols("x1:4")
