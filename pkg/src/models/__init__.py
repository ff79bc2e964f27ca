"""Pydantic models for configs, certificates and reports."""
from src.models.reports import (
    CertificateRecord,
    ClassKind,
    ExperimentConfig,
    GrowthTable,
    PointRecord,
    Report,
    RunMode,
    RunStatus,
    StructureRecord,
)

__all__ = [
    "CertificateRecord",
    "ClassKind",
    "ExperimentConfig",
    "GrowthTable",
    "PointRecord",
    "Report",
    "RunMode",
    "RunStatus",
    "StructureRecord",
]
