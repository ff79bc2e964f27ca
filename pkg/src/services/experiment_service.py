"""Experiment service dispatching a config through classify, commute, varieties and bounds."""
import asyncio
import logging
import time
from typing import Optional

from pydantic import ValidationError

from src.algebra.polynomials import format_poly, parse_poly
from src.config import settings
from src.dynamics.classify import classify
from src.dynamics.commute import commuter_set
from src.exceptions import DynaHeightError, XoaEmptyError
from src.geometry.signatures import Signature, enumerate_signatures
from src.geometry.varieties import AmbientVariety
from src.models.reports import ExperimentConfig, GrowthTable, Report, RunMode, RunStatus, SymmetryRecord
from src.services.bounds_service import BoundsService, certificate, structure_degree_bound

logger = logging.getLogger(__name__)


class ExperimentService:
    """Runs one experiment config end to end and collects a Report."""

    def __init__(self, jobs: Optional[int] = None):
        self.bounds = BoundsService(jobs)

    async def run(self, config: ExperimentConfig) -> Report:
        """
        Execute ``config`` and return its report.

        Library errors never escape: a gate failure becomes status
        ``xoa_empty`` and every other typed error becomes ``rejected``
        with the error text as message.
        """
        started = time.perf_counter()
        settings.SEED = config.seed
        report = Report(config=config, status=RunStatus.PASSED)

        logger.info("🧪 Experiment started", extra={"experiment": config.name, "mode": config.mode.value})
        try:
            f = parse_poly(config.f)
            label = classify(f)
            report.classification = label.to_dict()
            if config.mode == RunMode.SYMMETRY:
                report.symmetry = self._symmetry(f, config)
            elif config.mode == RunMode.REPRODUCE:
                report.growth = await self.bounds.reproduce_example(
                    config.example_id, f, config.m_range, config.seed_point
                )
                report.iterate_statistics = self._iterate_statistics(report.growth)
                report.status = RunStatus.GROWTH
            else:
                variety = AmbientVariety.from_strings(config.X, config.n, dim_hint=config.codim)
                if config.mode == RunMode.VERIFY:
                    await self._verify(f, variety, config, report)
                elif config.mode == RunMode.CERTIFY:
                    self._certify(f, variety, config, report)
                else:
                    report.structure = structure_degree_bound(variety, f, config.k_max).to_record()
        except XoaEmptyError as e:
            report.status = RunStatus.XOA_EMPTY
            report.message = str(e)
        except (DynaHeightError, ValidationError, ValueError) as e:
            report.status = RunStatus.REJECTED
            report.message = str(e)

        if config.record_timing:
            report.timing = {"total_seconds": time.perf_counter() - started}
        logger.info(
            "🏁 Experiment finished",
            extra={"experiment": config.name, "status": report.status.value, "message": report.message},
        )
        return report

    async def _verify(self, f, variety: AmbientVariety, config: ExperimentConfig, report: Report) -> None:
        result = await self.bounds.verify_bounded(
            variety,
            f,
            config.codim,
            config.max_gen_deg,
            config.budget,
            config.k_max,
            config.target_error,
            config.include_large_degree,
        )
        report.certificates = [c.to_record() for c in result.certificates]
        report.samples = result.samples
        report.violations = result.violations
        report.anomalous = result.anomalous
        report.statistics = result.statistics
        if report.violations:
            report.status = RunStatus.VIOLATION
            report.message = f"{len(report.violations)} sampled point(s) exceed c1"

    def _certify(self, f, variety: AmbientVariety, config: ExperimentConfig, report: Report) -> None:
        if config.signature is not None:
            signature = Signature.from_dict({"n": config.n, **config.signature})
            report.certificate = certificate(variety, signature, f, config.k_max).to_record()
            return
        signatures = enumerate_signatures(variety.n, variety.dim_hint)
        report.certificates = [certificate(variety, s, f, config.k_max).to_record() for s in signatures]

    @staticmethod
    def _iterate_statistics(table: GrowthTable) -> dict[str, float]:
        """Largest orbit iterate, orbit value height and value degree reached over the table."""
        if not table.rows:
            return {}
        return {
            "max_iterations": max(row.iterations for row in table.rows),
            "max_orbit_height": max(row.max_orbit_height for row in table.rows),
            "max_value_degree": max(row.max_value_degree for row in table.rows),
        }

    @staticmethod
    def _symmetry(f, config: ExperimentConfig) -> SymmetryRecord:
        commuters = commuter_set(f, config.k_max)
        return SymmetryRecord(
            f=format_poly(f),
            order=commuters.group.order,
            elements=[e.to_dict() for e in commuters.group.elements],
            minimal_commuter=format_poly(commuters.base),
            D_exponent=commuters.D_exponent,
            commuters=[c.to_dict() for c in commuters.elements_up_to(config.max_gen_deg)],
            k_max=commuters.k_max,
        )


def run(config: ExperimentConfig, jobs: Optional[int] = None) -> Report:
    return asyncio.run(ExperimentService(jobs).run(config))
