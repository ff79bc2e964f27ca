"""Services orchestrating certificates and experiments."""
from src.services.bounds_service import BoundsService, certificate, sample_intersection, structure_degree_bound
from src.services.experiment_service import ExperimentService

__all__ = ["BoundsService", "ExperimentService", "certificate", "sample_intersection", "structure_degree_bound"]
