from __future__ import annotations

from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from .lattice import Shape
from .young import RationalParam


# --- Enums ---

class Configuration(str, Enum):
    CROSSING = "crossing"
    HBRIDGE = "hbridge"
    VBRIDGE = "vbridge"
    SINGLET = "singlet"


class GeneratorKind(str, Enum):
    G = "g"
    E = "e"


class CouplingMode(str, Enum):
    PLAIN = "plain"
    BAR = "bar"


class Gauge(str, Enum):
    IDENTITY = "identity"
    REVERSE = "reverse"


class ActionConvention(str, Enum):
    JUCYS_MURPHY = "jucys_murphy"
    LITERAL = "literal"


class Command(str, Enum):
    ENUM = "enum"
    REP = "rep"
    GRAPH = "graph"
    SOLVE = "solve"
    SWEEP = "sweep"


# --- Shared ---

class SignatureModel(BaseModel):
    f: int
    shape: str
    f1: int
    f2: int
    shape1: str
    shape2: str


class CheckModel(BaseModel):
    name: str
    residual: float
    tolerance: float
    passed: bool
    note: Optional[str] = None


# --- gt-rep ---

class ModuleDump(BaseModel):
    f: int
    shape: str
    x: str
    convention: ActionConvention
    basis: list[str]
    g: dict[str, list[list[float]]] = Field(default_factory=dict)
    e: dict[str, list[list[float]]] = Field(default_factory=dict)


class RelationDump(BaseModel):
    f: int
    shape: str
    x: str
    passed: bool
    relations: list[CheckModel] = Field(default_factory=list)
    opportunistic: list[CheckModel] = Field(default_factory=list)
    calibration: dict[str, str] = Field(default_factory=dict)


# --- subduction-graph ---

class EdgeModel(BaseModel):
    source: int
    target: int
    i: int


class GridDump(BaseModel):
    signature: SignatureModel
    nodes: list[str]
    edges: list[EdgeModel] = Field(default_factory=list)
    configurations: dict[str, list[Configuration]] = Field(default_factory=dict)
    histogram: dict[str, dict[Configuration, int]] = Field(default_factory=dict)


# --- subduction-solver / ortho-phase ---

class SolutionDump(BaseModel):
    signature: SignatureModel
    x: str
    multiplicity: int
    ambiguous: bool
    singular_value_tail: list[float] = Field(default_factory=list)
    vectors: dict[str, list[float]] = Field(default_factory=dict)
    block_residuals: dict[str, float] = Field(default_factory=dict)


class SdcTableDump(BaseModel):
    signature: SignatureModel
    x: str
    multiplicity: int
    gauge: Gauge
    coefficients: dict[str, list[float]] = Field(default_factory=dict)
    freedom: dict[str, int] = Field(default_factory=dict)


class VerificationDump(BaseModel):
    signature: SignatureModel
    x: str
    multiplicity: int
    passed: bool
    checks: list[CheckModel] = Field(default_factory=list)


class CompletenessRow(BaseModel):
    shape1: str
    shape2: str
    multiplicity: int
    dim1: int
    dim2: int


class CompletenessDump(BaseModel):
    f: int
    shape: str
    f1: int
    f2: int
    x: str
    dimension: int
    total: int
    passed: bool
    unitarity_residual: Optional[float] = None
    rows: list[CompletenessRow] = Field(default_factory=list)


# --- CLI ---

class JobConfig(BaseModel):
    command: Command
    f: int = Field(ge=0)
    shape: str = "[]"
    f1: Optional[int] = Field(default=None, ge=1)
    f2: Optional[int] = Field(default=None, ge=1)
    shape1: Optional[str] = None
    shape2: Optional[str] = None
    x: Optional[str] = None
    rank_tol: Optional[float] = Field(default=None, gt=0.0)
    residual_tol: Optional[float] = Field(default=None, gt=0.0)
    phase_tol: Optional[float] = Field(default=None, gt=0.0)
    gauge: Optional[Gauge] = None
    output_dir: Optional[str] = None
    check_relations: bool = False
    dot: bool = False
    json_out: bool = True
    csv_out: bool = False
    allow_nonsemisimple: bool = False

    @field_validator("shape", "shape1", "shape2")
    @classmethod
    def _shape_syntax(cls, v: Optional[str]) -> Optional[str]:
        if v is None:
            return v
        return str(Shape.parse(v))

    @field_validator("x")
    @classmethod
    def _rational_syntax(cls, v: Optional[str]) -> Optional[str]:
        if v is None:
            return v
        return str(RationalParam.parse(v))

    @model_validator(mode="after")
    def _split_adds_up(self) -> JobConfig:
        if self.command in (Command.GRAPH, Command.SOLVE, Command.SWEEP):
            if self.f1 is None:
                raise ValueError("--f1 is required")
            if self.f2 is None:
                self.f2 = self.f - self.f1
            if self.f1 + self.f2 != self.f:
                raise ValueError(f"f1 + f2 must equal f ({self.f1} + {self.f2} != {self.f})")
            if self.f2 < 1:
                raise ValueError("f2 must be at least 1")
        if self.command in (Command.GRAPH, Command.SOLVE) and (self.shape1 is None or self.shape2 is None):
            raise ValueError("--shape1 and --shape2 are required")
        if self.command in (Command.REP, Command.SOLVE, Command.SWEEP) and self.x is None:
            raise ValueError("--x is required")
        return self
