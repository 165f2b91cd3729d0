"""Integration tests for the orchestrator and its sweep mode."""

from __future__ import annotations

import pytest

from brauersdc.config import Settings, get_settings
from brauersdc.diagnostics import ResidualTracker
from brauersdc.errors import SemisimplicityError
from brauersdc.grid import Signature
from brauersdc.lattice import Shape
from brauersdc.pipeline import SubductionPipeline
from brauersdc.young import RationalParam

X = RationalParam.parse("7/2")
EMPTY = Shape(())
ONE = Shape((1,))


@pytest.fixture
def pipeline(tmp_path) -> SubductionPipeline:
    return SubductionPipeline(Settings(output_dir=tmp_path, workers=2))


# --- Residual tracking ---


def test_tracker_keeps_worst_residual():
    tracker = ResidualTracker(1e-9)
    tracker.record("a", 1e-12)
    tracker.record("a", 1e-10)
    tracker.skip("b", "fixed point")
    tracker.skip("b", "fixed point")
    report = tracker.report("demo")
    assert report.passed
    assert report.record("a").count == 2
    assert report.record("a").residual == pytest.approx(1e-10)
    assert report.checks == 2
    assert tracker.skipped == 2
    assert report.notes == ("b: fixed point", "skipped b x2")


def test_tracker_exact_tolerance():
    tracker = ResidualTracker(1e-9)
    tracker.record("dim", 1.0, 0.0)
    assert not tracker.passed()
    assert tracker.worst().name == "dim"


# --- Single signature ---


def test_run_order_three(pipeline):
    result = pipeline.run(Signature(3, ONE, 2, 1, EMPTY, ONE), X)
    assert result.multiplicity == 1
    assert result.passed, [c for c in result.report.checks() if not c.passed]
    assert set(result.timings_ms) == {"modules", "grid", "solve", "ortho", "verify"}
    names = {c.name for c in result.report.checks()}
    assert "solution.omega_residual" in names
    assert "orthonormality.unitarity_columns" in names
    assert "bridge_kernels.vbridge_kernel" in names


def test_run_stable_case(pipeline):
    result = pipeline.run(Signature(3, Shape((2, 1)), 2, 1, Shape((2,)), ONE), RationalParam.parse(5))
    assert result.multiplicity == 1
    assert result.passed


def test_run_multiplicities(pipeline):
    result = pipeline.run(Signature(2, Shape((2,)), 1, 1, ONE, ONE), X)
    assert result.multiplicity == 1
    result = pipeline.run(Signature(3, Shape((2, 1)), 2, 1, Shape((1, 1)), Shape((1,))), X)
    assert result.table is not None
    result = pipeline.run(Signature(3, Shape((3,)), 2, 1, Shape((1, 1)), ONE), X)
    assert result.multiplicity == 0
    assert result.table is None
    assert result.passed


def test_guard_rejects_small_integer_x(pipeline):
    with pytest.raises(SemisimplicityError):
        pipeline.run(Signature(4, Shape((2,)), 2, 2, Shape((2,)), EMPTY), RationalParam.parse(2))


def test_guard_can_be_disabled(tmp_path):
    pipeline = SubductionPipeline(Settings(output_dir=tmp_path, allow_nonsemisimple=True))
    sig = Signature(2, Shape((2,)), 1, 1, ONE, ONE)
    assert pipeline.run(sig, RationalParam.parse(0)).multiplicity == 1


def test_dumps(pipeline):
    result = pipeline.run(Signature(3, ONE, 2, 1, EMPTY, ONE), X)
    solution = result.solution_dump()
    assert solution.multiplicity == 1
    assert solution.signature.shape1 == "[]"
    assert list(solution.vectors) == [str(n) for n in result.grid.nodes]
    verification = result.verification_dump()
    assert verification.passed
    assert verification.x == "7/2"


# --- Sweep ---


@pytest.mark.asyncio
async def test_sweep_is_complete_and_unitary(pipeline):
    sweep = await pipeline.sweep(3, ONE, 2, 1, X)
    assert len(sweep.results) == 3
    assert sweep.completeness.passed
    assert sweep.completeness.total == 3
    assert sweep.unitarity.passed
    assert sweep.passed
    assert not sweep.ambiguous


@pytest.mark.asyncio
async def test_sweep_order_four_empty_shape(pipeline):
    sweep = await pipeline.sweep(4, EMPTY, 2, 2, X)
    assert sweep.completeness.total == sweep.completeness.dimension == 3
    assert sweep.passed



@pytest.mark.asyncio
async def test_sweep_through_cancelled_ibar_diagonal(pipeline):
    sweep = await pipeline.sweep(4, Shape((1, 1)), 2, 2, RationalParam.parse(5))
    assert sweep.completeness.total == sweep.completeness.dimension
    assert sweep.passed


# --- Settings ---


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("BRAUERSDC_RANK_TOL", "1e-8")
    monkeypatch.setenv("BRAUERSDC_GAUGE", "reverse")
    get_settings.cache_clear()
    try:
        settings = get_settings()
        assert settings.rank_tol == pytest.approx(1e-8)
        assert settings.gauge.value == "reverse"
    finally:
        get_settings.cache_clear()


def test_settings_defaults():
    settings = Settings()
    assert settings.residual_tol == pytest.approx(1e-9)
    assert settings.workers >= 1
