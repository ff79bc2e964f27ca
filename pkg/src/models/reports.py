"""Report, certificate and experiment models."""
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ClassKind(str, Enum):
    """Linear-conjugacy class of a polynomial."""
    POWER = "power"
    CHEBYSHEV = "chebyshev"
    DISINTEGRATED = "disintegrated"


class RunStatus(str, Enum):
    """Outcome of an experiment run."""
    PASSED = "passed"
    VIOLATION = "violation"
    XOA_EMPTY = "xoa_empty"
    GROWTH = "growth"
    REJECTED = "rejected"


class RunMode(str, Enum):
    """What an experiment config asks for."""
    VERIFY = "verify"
    CERTIFY = "certify"
    REPRODUCE = "reproduce"
    STRUCTURE = "structure"
    SYMMETRY = "symmetry"


class ProvenanceEntry(BaseModel):
    """One step of a constant's derivation."""
    model_config = ConfigDict(frozen=True)

    constant: str
    formula: str
    value: float


class HeightRecord(BaseModel):
    value: float
    radius: float
    exact: bool


class InequalityConstantsRecord(BaseModel):
    """C1, C2, C4, C5 for one projection and pivot."""
    projection: str
    pivot: str
    C1: float
    C2: float
    C4: float
    C5: float
    coefficients: list[int] = Field(default_factory=list, description="2*D_j multipliers of the other coordinates")
    provenance: list[ProvenanceEntry] = Field(default_factory=list)


class CertificateRecord(BaseModel):
    """Serialized bounded-height certificate."""
    X_id: str
    signature: dict[str, Any]
    c1: float
    c2: float
    c3: float
    c4: float
    M: int
    constants_used: list[InequalityConstantsRecord] = Field(default_factory=list)
    provenance: list[ProvenanceEntry] = Field(default_factory=list)


class PointRecord(BaseModel):
    """A sampled intersection point with its heights."""
    variety: str
    point: list[str] = Field(default_factory=list, description="Printed coordinates")
    D_V: Optional[int] = Field(default=None, description="D(V) of the periodic variety, None when infinite")
    coordinates: list[dict[str, Any]]
    height: HeightRecord
    canonical_heights: list[HeightRecord] = Field(default_factory=list)
    gate_passed: bool = True


class GrowthRow(BaseModel):
    """One row of an unbounded-height reproduction table."""
    m: int
    point: list[str]
    height: float
    radius: float
    exact: bool
    iterations: int = 0
    max_orbit_height: float = 0.0
    max_value_degree: int = 1


class GrowthTable(BaseModel):
    example_id: int
    f: str
    seed_point: str
    growth_constant: float
    rows: list[GrowthRow] = Field(default_factory=list)


class StructureRecord(BaseModel):
    """Degree bound M and the finite hypersurface collection."""
    M: int
    c5: float
    hypersurfaces: list[str] = Field(default_factory=list)
    linear_hypersurfaces: list[str] = Field(default_factory=list)
    infinity_families: list[str] = Field(default_factory=list)
    constant_families: list[str] = Field(default_factory=list)
    vanishing_systems: list[dict[str, Any]] = Field(default_factory=list)


class SymmetryRecord(BaseModel):
    f: str
    order: int
    elements: list[dict[str, Any]] = Field(default_factory=list)
    minimal_commuter: str
    D_exponent: int
    commuters: list[dict[str, Any]] = Field(default_factory=list)
    k_max: int


class ExperimentConfig(BaseModel):
    """
    Experiment configuration, loaded from JSON or assembled from flags.

    A fixed seed makes a run fully deterministic.
    """
    model_config = ConfigDict(extra="forbid")

    name: str = "experiment"
    mode: RunMode = RunMode.VERIFY
    f: str
    X: list[str] = Field(default_factory=list, description="Defining equations of X in x1..xn")
    n: int = Field(default=2, ge=1)
    codim: int = Field(default=1, ge=0)
    max_gen_deg: int = Field(default=16, ge=1)
    budget: int = Field(default=64, ge=1)
    m_range: list[int] = Field(default_factory=lambda: [1, 5], min_length=2, max_length=2)
    signature: Optional[dict[str, Any]] = Field(default=None, description="{\"J_V\": [...], \"chains\": [[...], ...]} for certify runs")
    include_large_degree: bool = False
    example_id: Optional[int] = Field(default=None, ge=1, le=2)
    seed_point: str = "1"
    target_error: float = Field(default=1e-9, gt=0)
    seed: int = 0
    k_max: Optional[int] = Field(default=None, ge=1)
    record_timing: bool = False

    @model_validator(mode="after")
    def check_mode_inputs(self) -> "ExperimentConfig":
        if self.m_range[0] < 1 or self.m_range[1] < self.m_range[0]:
            raise ValueError(f"m_range must satisfy 1 <= lo <= hi, got {self.m_range}")
        if self.mode in (RunMode.VERIFY, RunMode.CERTIFY, RunMode.STRUCTURE) and not self.X:
            raise ValueError(f"mode {self.mode.value} needs the equations of X")
        if self.mode == RunMode.REPRODUCE and self.example_id is None:
            raise ValueError("mode reproduce needs example_id 1 or 2")
        return self


class Report(BaseModel):
    """Everything an experiment run produced; violations empty on passing runs."""
    config: ExperimentConfig
    status: RunStatus
    message: str = ""
    classification: Optional[dict[str, Any]] = None
    certificate: Optional[CertificateRecord] = None
    certificates: list[CertificateRecord] = Field(default_factory=list)
    samples: list[PointRecord] = Field(default_factory=list)
    violations: list[PointRecord] = Field(default_factory=list)
    anomalous: list[PointRecord] = Field(default_factory=list)
    growth: Optional[GrowthTable] = None
    structure: Optional[StructureRecord] = None
    symmetry: Optional[SymmetryRecord] = None
    statistics: dict[str, int] = Field(default_factory=dict)
    iterate_statistics: dict[str, float] = Field(default_factory=dict)
    timing: Optional[dict[str, float]] = None

    @property
    def exit_code(self) -> int:
        if self.status == RunStatus.VIOLATION:
            return 2
        if self.status == RunStatus.REJECTED:
            return 1
        return 0
