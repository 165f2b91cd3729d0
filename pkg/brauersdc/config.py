from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings

from .schemas import Gauge


class Settings(BaseSettings):
    # Numerical thresholds
    rank_tol: float = Field(
        default=1e-10, gt=0.0, lt=1.0,
        description="Singular values below rank_tol * s_max count as zero",
    )
    rank_gap: float = Field(
        default=10.0, gt=1.0,
        description="Singular values within this factor of the threshold flag the rank as ambiguous",
    )
    residual_tol: float = Field(default=1e-9, gt=0.0, description="Max |Omega v| per solution vector")
    relation_tol: float = Field(default=1e-9, gt=0.0, description="Max residual of the algebra relations")
    unitarity_tol: float = Field(default=1e-8, gt=0.0, description="Unitarity / block-diagonal tolerance")
    structure_tol: float = Field(default=1e-8, gt=0.0, description="Bridge and singlet verification tolerance")
    phase_tol: float = Field(
        default=1e-7, gt=0.0, lt=1.0,
        description="Entries below phase_tol * column max are treated as zero when fixing phases",
    )

    # Multiplicity gauge O of the Sylvester construction
    gauge: Gauge = Field(default=Gauge.IDENTITY)

    # Parameter guard
    allow_nonsemisimple: bool = Field(
        default=False, description="Accept integer x < f - 1 (relations are not guaranteed)"
    )

    # Output
    output_dir: Path = Field(default=Path("out"))
    log_level: str = Field(default="INFO")
    workers: int = Field(default=4, ge=1, le=64, description="Parallel jobs in sweep mode")

    model_config = {"env_prefix": "BRAUERSDC_", "env_file": ".env", "env_file_encoding": "utf-8"}


@lru_cache
def get_settings() -> Settings:
    return Settings()
