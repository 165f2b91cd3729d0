"""Command-line entry point: enum, rep, graph, solve and sweep."""

from __future__ import annotations

import argparse
import asyncio
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from .config import Settings, get_settings
from .errors import EXIT_AMBIGUOUS, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, BrauerError, RankAmbiguityError
from .export import (
    artifact_stem,
    module_dump,
    module_stem,
    relation_dump,
    sweep_stem,
    write_csv,
    write_dot,
    write_json,
)
from .grid import Signature, build_grid, grid_dump, histogram
from .gt_module import build_module, calibration_anchor, check_relations
from .lattice import Shape, dimension, enumerate_lattices
from .pipeline import PipelineResult, SubductionPipeline, SweepResult
from .schemas import ActionConvention, Command, Gauge, JobConfig
from .young import RationalParam

logger = logging.getLogger(__name__)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", dest="output_dir", default=None, help="Output directory")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    common.add_argument("--allow-nonsemisimple", action="store_true", help="Accept integer x < f - 1")

    target = argparse.ArgumentParser(add_help=False)
    target.add_argument("--f", type=int, required=True, help="Order of the algebra")
    target.add_argument("--shape", default="[]", help='Irrep label, e.g. "[2,1]" or "[]"')

    split = argparse.ArgumentParser(add_help=False)
    split.add_argument("--f1", type=int, required=True)
    split.add_argument("--f2", type=int, default=None, help="Defaults to f - f1")

    labels = argparse.ArgumentParser(add_help=False)
    labels.add_argument("--shape1", default=None)
    labels.add_argument("--shape2", default=None)

    numeric = argparse.ArgumentParser(add_help=False)
    numeric.add_argument("--x", required=True, help='Parameter as "p/q" or an integer')
    numeric.add_argument("--rank-tol", type=float, default=None)
    numeric.add_argument("--residual-tol", type=float, default=None)
    numeric.add_argument("--phase-tol", type=float, default=None)
    numeric.add_argument("--gauge", choices=[g.value for g in Gauge], default=None)

    outputs = argparse.ArgumentParser(add_help=False)
    outputs.add_argument("--csv", dest="csv_out", action="store_true", help="Also write the table as CSV")
    outputs.add_argument("--no-json", dest="json_out", action="store_false")

    parser = argparse.ArgumentParser(prog="brauersdc", description="Brauer algebra subduction coefficients")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("enum", parents=[common, target], help="List the lattices of [f, shape]")

    rep = sub.add_parser("rep", parents=[common, target], help="Build the representation matrices")
    rep.add_argument("--x", required=True)
    rep.add_argument("--check", dest="check_relations", action="store_true", help="Run the relation suite")
    rep.add_argument(
        "--convention",
        choices=[c.value for c in ActionConvention],
        default=ActionConvention.JUCYS_MURPHY.value,
    )

    graph = sub.add_parser("graph", parents=[common, target, split, labels], help="Build the subduction grid")
    graph.add_argument("--dot", action="store_true", help="Write the overlap graph as DOT")
    graph.add_argument("--layer", type=int, default=None, help="Colour DOT nodes by their configuration at i")
    graph.add_argument("--no-json", dest="json_out", action="store_false")

    solve = sub.add_parser(
        "solve", parents=[common, target, split, labels, numeric, outputs], help="Compute one SDC table"
    )
    solve.add_argument("--sweep", action="store_true", help="Solve every (shape1, shape2) and check completeness")

    sub.add_parser(
        "sweep", parents=[common, target, split, numeric, outputs], help="Solve every (shape1, shape2) of a split"
    )
    return parser


def _job_config(args: argparse.Namespace) -> JobConfig:
    command = Command(args.command)
    if command == Command.SOLVE and getattr(args, "sweep", False):
        command = Command.SWEEP
    fields = {
        k: v
        for k, v in vars(args).items()
        if k in JobConfig.model_fields and k != "command" and v is not None
    }
    return JobConfig(command=command, **fields)


def _resolve_settings(job: JobConfig, args: argparse.Namespace) -> Settings:
    """Merge job flags with the settings defaults; explicit flags win."""
    settings = get_settings()
    update = {
        "rank_tol": job.rank_tol if job.rank_tol is not None else settings.rank_tol,
        "residual_tol": job.residual_tol if job.residual_tol is not None else settings.residual_tol,
        "phase_tol": job.phase_tol if job.phase_tol is not None else settings.phase_tol,
        "gauge": job.gauge if job.gauge is not None else settings.gauge,
        "output_dir": Path(job.output_dir) if job.output_dir is not None else settings.output_dir,
        "allow_nonsemisimple": job.allow_nonsemisimple or settings.allow_nonsemisimple,
        "log_level": args.log_level or settings.log_level,
    }
    return settings.model_copy(update=update)


# --- Commands ---

def cmd_enum(job: JobConfig, settings: Settings) -> int:
    shape = Shape.parse(job.shape)
    lattices = enumerate_lattices(job.f, shape)
    expected = dimension(job.f, shape)
    for w in lattices:
        print(w)
    print(f"count={len(lattices)} dimension={expected}")
    if len(lattices) != expected:
        logger.error(f"Enumeration of [{job.f},{shape}] found {len(lattices)} lattices, expected {expected}")
        return EXIT_VERIFICATION
    return EXIT_OK


def cmd_rep(job: JobConfig, settings: Settings, convention: ActionConvention) -> int:
    shape = Shape.parse(job.shape)
    x = RationalParam.parse(job.x).guard(job.f, settings.allow_nonsemisimple)
    module = build_module(job.f, shape, x, convention)
    stem = module_stem(job.f, shape, x)
    if job.json_out:
        write_json(settings.output_dir / f"{stem}.json", module_dump(module))
    print(f"[{job.f},{shape}] at x={x}: dim={module.dim}, convention={convention.value}")
    if not job.check_relations:
        return EXIT_OK

    report = check_relations(module, settings.relation_tol)
    anchor = calibration_anchor(x)
    if job.json_out:
        write_json(settings.output_dir / f"{stem}.relations.json", relation_dump(report, anchor))
    for name, residual in report.relations.items():
        flag = "ok" if residual <= report.tol else "FAIL"
        print(f"  {name:<12} {residual:.3e} {flag}")
    for name, residual in report.opportunistic.items():
        print(f"  {name:<12} {residual:.3e} (reported)")
    print(
        f"  calibration on [2,[]]: forced g={anchor.forced}, e={anchor.e}, "
        f"literal g={anchor.literal}, calibrated g={anchor.calibrated}"
    )
    if not report.passed:
        logger.error(f"Relations fail for [{job.f},{shape}] at x={x}: {', '.join(report.failures)}")
        return EXIT_VERIFICATION
    return EXIT_OK


def _signature(job: JobConfig) -> Signature:
    return Signature(
        job.f, Shape.parse(job.shape), job.f1, job.f2, Shape.parse(job.shape1), Shape.parse(job.shape2)
    )


def cmd_graph(job: JobConfig, settings: Settings, layer: int | None) -> int:
    sig = _signature(job)
    grid = build_grid(sig)
    stem = artifact_stem(sig)
    if job.json_out:
        write_json(settings.output_dir / f"{stem}.grid.json", grid_dump(grid))
    if job.dot:
        suffix = f".layer{layer}" if layer is not None else ""
        write_dot(settings.output_dir / f"{stem}{suffix}.dot", grid, layer)
    print(f"{sig}: {grid.size} nodes, {len(grid.edges)} edges")
    for i, row in histogram(grid).items():
        counts = " ".join(f"{tag.value}={n}" for tag, n in row.items())
        print(f"  i={i}: {counts}")
    return EXIT_OK


def _write_result(result: PipelineResult, job: JobConfig, settings: Settings) -> None:
    stem = artifact_stem(result.signature, result.x)
    out = settings.output_dir
    if job.json_out:
        write_json(out / f"{stem}.solution.json", result.solution_dump())
        write_json(out / f"{stem}.verification.json", result.verification_dump())
        if result.table is not None:
            write_json(out / f"{stem}.table.json", result.table.to_model())
    if job.csv_out and result.table is not None:
        write_csv(out / f"{stem}.csv", result.table)


def _print_result(result: PipelineResult) -> None:
    status = "pass" if result.passed else "FAIL"
    flag = " (ambiguous rank)" if result.ambiguous else ""
    print(f"{result.signature} x={result.x}: multiplicity={result.multiplicity}{flag}, checks {status}")
    for check in result.report.checks():
        if not check.passed:
            print(f"  {check.name}: {check.residual:.3e} > {check.tolerance:.1e}")


def cmd_solve(job: JobConfig, settings: Settings) -> int:
    sig = _signature(job)
    result = SubductionPipeline(settings).run(sig, RationalParam.parse(job.x))
    _write_result(result, job, settings)
    _print_result(result)
    if result.ambiguous:
        tail = ", ".join(f"{s:.3e}" for s in result.basis.singular_values[-5:])
        raise RankAmbiguityError(f"rank of Omega for {sig} is ambiguous; smallest singular values {tail}")
    return EXIT_OK if result.passed else EXIT_VERIFICATION


def cmd_sweep(job: JobConfig, settings: Settings) -> int:
    shape = Shape.parse(job.shape)
    x = RationalParam.parse(job.x)
    pipeline = SubductionPipeline(settings)
    sweep: SweepResult = asyncio.run(pipeline.sweep(job.f, shape, job.f1, job.f2, x))
    for result in sweep.results:
        _write_result(result, job, settings)
        _print_result(result)
    completeness = sweep.completeness
    dump = completeness.to_model().model_copy(update={"unitarity_residual": sweep.unitarity.residual})
    if job.json_out:
        write_json(settings.output_dir / f"{sweep_stem(job.f, shape, job.f1, job.f2, x)}.json", dump)
    print(
        f"completeness: sum mu*d1*d2 = {completeness.total}, dim = {completeness.dimension}, "
        f"unitarity {sweep.unitarity.residual:.3e}"
    )
    if sweep.ambiguous:
        raise RankAmbiguityError(f"rank ambiguous for at least one label pair of ({job.f},{shape};{job.f1},{job.f2})")
    return EXIT_OK if sweep.passed else EXIT_VERIFICATION


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        job = _job_config(args)
    except ValidationError as e:
        print(f"brauersdc: invalid arguments\n{e}", file=sys.stderr)
        return EXIT_USAGE

    settings = _resolve_settings(job, args)
    logging.basicConfig(level=settings.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    logger.debug(f"Job: {job.model_dump(exclude_none=True)}")

    try:
        if job.command == Command.ENUM:
            return cmd_enum(job, settings)
        if job.command == Command.REP:
            return cmd_rep(job, settings, ActionConvention(args.convention))
        if job.command == Command.GRAPH:
            return cmd_graph(job, settings, args.layer)
        if job.command == Command.SOLVE:
            return cmd_solve(job, settings)
        return cmd_sweep(job, settings)
    except RankAmbiguityError as e:
        logger.error(str(e))
        return EXIT_AMBIGUOUS
    except BrauerError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except ValueError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except Exception:
        logger.exception("Unexpected failure")
        return EXIT_VERIFICATION


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
