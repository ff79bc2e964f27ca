"""Heights, classification and commuting polynomials for a single polynomial map."""
from src.dynamics.classify import ClassLabel, NormalForm, chebyshev, classify, normal_form
from src.dynamics.commute import (
    Commuter,
    CommuterSet,
    SymmetryGroup,
    commuter_set,
    commuters_up_to,
    is_commuter,
    minimal_commuter,
    symmetry_group,
)
from src.dynamics.heights import (
    HeightValue,
    InequalityConstants,
    canonical_height,
    canonical_bound_constant,
    height_expansion_constant,
    height_n,
    inequality_constants,
    lower_height_constant,
    upper_height_constant,
    weil_height,
)

__all__ = [
    "ClassLabel",
    "Commuter",
    "CommuterSet",
    "HeightValue",
    "InequalityConstants",
    "NormalForm",
    "SymmetryGroup",
    "canonical_height",
    "chebyshev",
    "classify",
    "commuter_set",
    "commuters_up_to",
    "canonical_bound_constant",
    "height_expansion_constant",
    "height_n",
    "inequality_constants",
    "is_commuter",
    "lower_height_constant",
    "upper_height_constant",
    "minimal_commuter",
    "normal_form",
    "symmetry_group",
    "weil_height",
]
