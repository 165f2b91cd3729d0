"""Orchestrator: modules -> grid -> Omega -> nullspace -> orthonormal table -> verification."""

from __future__ import annotations

import asyncio
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .config import Settings, get_settings
from .diagnostics import PipelineReport, ResidualTracker, VerificationReport
from .gt_module import GTModule
from .grid import Signature, SubductionGrid, build_grid
from .lattice import Shape, dimension
from .ortho import GramResult, SdcTable, block_diagonalization, fix_phases, gram, orthonormalize, unitarity_sweep
from .schemas import SolutionDump, VerificationDump
from .solver import (
    CompletenessReport,
    SolutionBasis,
    SubductionSystem,
    assemble,
    load_modules,
    solve,
    split_signatures,
)
from .structure import verify_bridge_kernels, verify_bridge_propagation, verify_singlet_structure
from .young import RationalParam

logger = logging.getLogger(__name__)


def _f17(v: float) -> float:
    return float(f"{v:.17g}")


@dataclass
class PipelineResult:
    """Everything produced for one signature at one x."""

    signature: Signature
    x: RationalParam
    grid: SubductionGrid
    system: SubductionSystem
    basis: SolutionBasis
    gram: GramResult | None = None
    table: SdcTable | None = None
    report: PipelineReport = field(default_factory=PipelineReport)
    timings_ms: dict[str, float] = field(default_factory=dict)

    @property
    def multiplicity(self) -> int:
        return self.basis.multiplicity

    @property
    def ambiguous(self) -> bool:
        return self.basis.ambiguous

    @property
    def passed(self) -> bool:
        return self.report.passed

    def solution_dump(self) -> SolutionDump:
        tail = self.basis.singular_values[-5:]
        return SolutionDump(
            signature=self.signature.to_model(),
            x=str(self.x),
            multiplicity=self.multiplicity,
            ambiguous=self.ambiguous,
            singular_value_tail=[_f17(s) for s in tail],
            vectors={
                str(node): [_f17(v) for v in self.basis.vectors[k]]
                for k, node in enumerate(self.grid.nodes)
            },
            block_residuals={k: _f17(v) for k, v in self.basis.block_residuals.items()},
        )

    def verification_dump(self) -> VerificationDump:
        return VerificationDump(
            signature=self.signature.to_model(),
            x=str(self.x),
            multiplicity=self.multiplicity,
            passed=self.passed,
            checks=self.report.checks(),
        )


@dataclass
class SweepResult:
    f: int
    shape: Shape
    f1: int
    f2: int
    x: RationalParam
    results: list[PipelineResult] = field(default_factory=list)
    completeness: CompletenessReport | None = None
    unitarity: VerificationReport | None = None

    @property
    def ambiguous(self) -> bool:
        return any(r.ambiguous for r in self.results)

    @property
    def passed(self) -> bool:
        return (
            all(r.passed for r in self.results)
            and (self.completeness is None or self.completeness.passed)
            and (self.unitarity is None or self.unitarity.passed)
        )


class SubductionPipeline:
    def __init__(self, settings: Settings | None = None):
        self.settings = settings or get_settings()

    def _run_module_phase(self, sig: Signature, x: RationalParam) -> tuple[GTModule, GTModule, GTModule]:
        for order in (sig.f, sig.f1, sig.f2):
            x.guard(order, self.settings.allow_nonsemisimple)
        return load_modules(sig, x, self.settings.relation_tol)

    def _run_solve_phase(
        self, grid: SubductionGrid, modules: tuple[GTModule, GTModule, GTModule]
    ) -> tuple[SubductionSystem, SolutionBasis]:
        system = assemble(grid, modules)
        basis = solve(system, self.settings.rank_tol, self.settings.rank_gap)
        return system, basis

    def _run_ortho_phase(
        self, grid: SubductionGrid, basis: SolutionBasis, x: RationalParam
    ) -> tuple[GramResult | None, SdcTable | None]:
        if basis.multiplicity == 0:
            return None, None
        _, d1, d2 = grid.signature.dims
        result = gram(basis, (d1, d2), self.settings.gauge)
        chi_tilde = orthonormalize(basis, result)
        table = fix_phases(chi_tilde, grid, x, self.settings.phase_tol, self.settings.gauge)
        logger.info(
            f"Orthonormalized {grid.signature}: multiplicity={table.multiplicity}, "
            f"unitarity={table.diagnostics['unitarity_columns']:.2e}"
        )
        return result, table

    def _run_verify_phase(
        self,
        system: SubductionSystem,
        basis: SolutionBasis,
        result: GramResult | None,
        table: SdcTable | None,
    ) -> PipelineReport:
        s = self.settings
        solution = ResidualTracker(s.residual_tol)
        solution.record("omega_residual", basis.residual)
        output = ResidualTracker(s.unitarity_tol)
        reports = [solution.report("solution")]
        if result is not None and table is not None:
            output.record("sylvester", result.residual)
            output.record("unitarity_columns", table.diagnostics["unitarity_columns"])
            for eta in range(table.multiplicity):
                column = table.coefficients[:, eta]
                lead = column[np.flatnonzero(np.abs(column) > s.phase_tol * np.abs(column).max())[0]]
                output.record("leading_positive", 0.0 if lead > 0 else float(abs(lead)), 0.0)
            reports.append(output.report("orthonormality"))
            reports.append(block_diagonalization(table, system, s.unitarity_tol))
        reports.append(verify_bridge_kernels(system, basis, s.structure_tol))
        reports.append(verify_bridge_propagation(system, basis, s.structure_tol))
        reports.append(verify_singlet_structure(system, basis, s.structure_tol, s.rank_tol))
        for report in reports:
            if not report.passed:
                logger.warning(f"Check {report.name} failed for {system.signature}: max residual {report.residual:.3e}")
        return PipelineReport(reports=tuple(reports))

    def run(self, sig: Signature, x: RationalParam) -> PipelineResult:
        """Full pipeline for one signature."""
        timings: dict[str, float] = {}

        t0 = time.perf_counter()
        modules = self._run_module_phase(sig, x)
        timings["modules"] = (time.perf_counter() - t0) * 1000

        t0 = time.perf_counter()
        grid = build_grid(sig)
        timings["grid"] = (time.perf_counter() - t0) * 1000

        t0 = time.perf_counter()
        system, basis = self._run_solve_phase(grid, modules)
        timings["solve"] = (time.perf_counter() - t0) * 1000

        t0 = time.perf_counter()
        result, table = self._run_ortho_phase(grid, basis, x)
        timings["ortho"] = (time.perf_counter() - t0) * 1000

        t0 = time.perf_counter()
        report = self._run_verify_phase(system, basis, result, table)
        timings["verify"] = (time.perf_counter() - t0) * 1000

        logger.info(
            f"Pipeline {sig} at x={x}: multiplicity={basis.multiplicity}, "
            f"passed={report.passed} in {sum(timings.values()):.0f}ms total"
        )
        return PipelineResult(
            signature=sig, x=x, grid=grid, system=system, basis=basis,
            gram=result, table=table, report=report, timings_ms=timings,
        )

    async def sweep(self, f: int, shape: Shape, f1: int, f2: int, x: RationalParam) -> SweepResult:
        """Run every (lambda1, lambda2) of the split concurrently, then check completeness."""
        signatures = split_signatures(f, shape, f1, f2)
        semaphore = asyncio.Semaphore(self.settings.workers)
        logger.info(f"Sweeping ({f},{shape};{f1},{f2}) over {len(signatures)} label pairs")

        async def run_one(sig: Signature) -> PipelineResult:
            async with semaphore:
                return await asyncio.to_thread(self.run, sig, x)

        results = list(await asyncio.gather(*(run_one(sig) for sig in signatures)))
        rows = tuple(
            (r.signature.shape1, r.signature.shape2, r.multiplicity, *r.signature.dims[1:])
            for r in results
        )
        completeness = CompletenessReport(
            f=f, shape=shape, f1=f1, f2=f2, x=x, dimension=dimension(f, shape),
            rows=rows, ambiguous=any(r.ambiguous for r in results),
        )
        unitarity = unitarity_sweep(
            (r.table for r in results if r.table is not None), self.settings.unitarity_tol
        )
        logger.info(
            f"Sweep ({f},{shape};{f1},{f2}): sum mu*d1*d2 = {completeness.total}, "
            f"dim = {completeness.dimension}, unitarity max {unitarity.residual:.2e}"
        )
        return SweepResult(
            f=f, shape=shape, f1=f1, f2=f2, x=x, results=results,
            completeness=completeness, unitarity=unitarity,
        )
