"""Subvarieties of (P^1)^n: signatures, periodic and special varieties, projections and gates."""
from src.geometry.elimination import (
    GateReport,
    check_gates,
    coefficient_vanishing_check,
    coefficient_vanishing_system,
    projection_hypersurface,
    sample_points,
)
from src.geometry.signatures import Signature, count_signatures, enumerate_signatures
from src.geometry.varieties import (
    AmbientVariety,
    DVValue,
    Embedding,
    PeriodicSubvariety,
    SpecialSubvariety,
    build_periodic,
    embed_in_hypersurface,
    membership,
)

__all__ = [
    "AmbientVariety",
    "DVValue",
    "Embedding",
    "GateReport",
    "PeriodicSubvariety",
    "Signature",
    "SpecialSubvariety",
    "build_periodic",
    "check_gates",
    "coefficient_vanishing_check",
    "coefficient_vanishing_system",
    "count_signatures",
    "embed_in_hypersurface",
    "enumerate_signatures",
    "membership",
    "projection_hypersurface",
    "sample_points",
]
