"""File outputs: JSON dumps, CSV tables and DOT graphs, all written atomically."""

from __future__ import annotations

import csv
import io
import logging
import os
import tempfile
from pathlib import Path

from pydantic import BaseModel

from .gt_module import CalibrationAnchor, GTModule, RelationReport
from .grid import Signature, SubductionGrid, export_dot
from .lattice import Shape
from .ortho import SdcTable
from .schemas import CheckModel, ModuleDump, RelationDump
from .young import RationalParam, format_rational

logger = logging.getLogger(__name__)

CSV_HEADER = ("w", "w1", "w2", "eta", "value")


def write_atomic(path: Path, text: str) -> Path:
    """Write through a temp file in the destination directory, then rename over ``path``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    logger.info(f"Wrote {path}")
    return path


def write_json(path: Path, model: BaseModel) -> Path:
    return write_atomic(path, model.model_dump_json(indent=2) + "\n")


def _shape_token(shape: Shape) -> str:
    return "-".join(str(r) for r in shape.rows) or "e"


def artifact_stem(sig: Signature, x: RationalParam | None = None) -> str:
    """Filesystem-safe name, e.g. f3_1__2_1__e__1__x7_2."""
    stem = (
        f"f{sig.f}_{_shape_token(sig.shape)}__{sig.f1}_{sig.f2}"
        f"__{_shape_token(sig.shape1)}__{_shape_token(sig.shape2)}"
    )
    if x is not None:
        stem += "__" + _x_token(x)
    return stem


def _x_token(x: RationalParam) -> str:
    return "x" + format_rational(x.value).replace("/", "_").replace("-", "m")


def module_stem(f: int, shape: Shape, x: RationalParam) -> str:
    return f"rep_f{f}_{_shape_token(shape)}__{_x_token(x)}"


def sweep_stem(f: int, shape: Shape, f1: int, f2: int, x: RationalParam) -> str:
    return f"sweep_f{f}_{_shape_token(shape)}__{f1}_{f2}__{_x_token(x)}"


# --- Serializers ---

def _matrix(a) -> list[list[float]]:
    return [[float(f"{v:.17g}") for v in row] for row in a]


def module_dump(m: GTModule) -> ModuleDump:
    return ModuleDump(
        f=m.f,
        shape=str(m.shape),
        x=str(m.x),
        convention=m.convention,
        basis=[str(w) for w in m.basis],
        g={str(i): _matrix(m.g_mats[i - 1]) for i in m.generator_indices},
        e={str(i): _matrix(m.e_mats[i - 1]) for i in m.generator_indices},
    )


def relation_dump(report: RelationReport, anchor: CalibrationAnchor | None = None) -> RelationDump:
    def checks(values: dict[str, float], gated: bool) -> list[CheckModel]:
        return [
            CheckModel(
                name=name,
                residual=float(f"{r:.17g}"),
                tolerance=report.tol,
                passed=r <= report.tol,
                note=None if gated else "reported only",
            )
            for name, r in values.items()
        ]

    calibration = {}
    if anchor is not None:
        calibration = {
            "x": str(anchor.x),
            "forced_g": format_rational(anchor.forced),
            "forced_e": format_rational(anchor.e),
            "literal_g": format_rational(anchor.literal),
            "calibrated_g": format_rational(anchor.calibrated),
        }
    return RelationDump(
        f=report.f,
        shape=str(report.shape),
        x=str(report.x),
        passed=report.passed,
        relations=checks(report.relations, True),
        opportunistic=checks(report.opportunistic, False),
        calibration=calibration,
    )


def table_csv(table: SdcTable) -> str:
    """One row per (node, eta): w, w1, w2, eta, value."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for k, node in enumerate(table.nodes):
        for eta in range(table.multiplicity):
            writer.writerow([str(node.w), str(node.w1), str(node.w2), eta + 1, f"{table.value(k, eta):.17g}"])
    return buf.getvalue()


def write_csv(path: Path, table: SdcTable) -> Path:
    return write_atomic(path, table_csv(table))


def write_dot(path: Path, grid: SubductionGrid, layer: int | None = None) -> Path:
    return write_atomic(path, export_dot(grid, layer))
