"""Residual bookkeeping shared by every verification pass."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .schemas import CheckModel


@dataclass
class CheckRecord:
    name: str
    residual: float
    tolerance: float
    count: int = 1
    note: str | None = None

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def to_model(self) -> CheckModel:
        return CheckModel(
            name=self.name,
            residual=float(f"{self.residual:.17g}"),
            tolerance=self.tolerance,
            passed=self.passed,
            note=self.note,
        )


@dataclass(frozen=True)
class VerificationReport:
    name: str
    records: tuple[CheckRecord, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def residual(self) -> float:
        return max((r.residual for r in self.records), default=0.0)

    @property
    def checks(self) -> int:
        return sum(r.count for r in self.records)

    def record(self, name: str) -> CheckRecord | None:
        return next((r for r in self.records if r.name == name), None)


class ResidualTracker:
    """Keeps the worst residual per named check, plus skip notes."""

    def __init__(self, tolerance: float):
        self._tolerance = tolerance
        self._records: dict[str, CheckRecord] = {}
        self._skipped: Counter[str] = Counter()
        self._notes: list[str] = []

    def record(self, name: str, residual: float, tolerance: float | None = None) -> None:
        tol = self._tolerance if tolerance is None else tolerance
        current = self._records.get(name)
        if current is None:
            self._records[name] = CheckRecord(name=name, residual=float(residual), tolerance=tol)
            return
        current.count += 1
        current.residual = max(current.residual, float(residual))

    def skip(self, name: str, note: str) -> None:
        if self._skipped[name] == 0:
            self._notes.append(f"{name}: {note}")
        self._skipped[name] += 1

    @property
    def skipped(self) -> int:
        return sum(self._skipped.values())

    def passed(self) -> bool:
        return all(r.passed for r in self._records.values())

    def worst(self) -> CheckRecord | None:
        return max(self._records.values(), key=lambda r: r.residual, default=None)

    def report(self, name: str) -> VerificationReport:
        notes = list(self._notes)
        if self._skipped:
            notes.append("skipped " + ", ".join(f"{k} x{v}" for k, v in sorted(self._skipped.items())))
        return VerificationReport(name=name, records=tuple(self._records.values()), notes=tuple(notes))


@dataclass(frozen=True)
class PipelineReport:
    """Every report produced for one signature, in pipeline order."""

    reports: tuple[VerificationReport, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def checks(self) -> list[CheckModel]:
        out = []
        for report in self.reports:
            for rec in report.records:
                model = rec.to_model()
                model.name = f"{report.name}.{rec.name}"
                out.append(model)
        return out
