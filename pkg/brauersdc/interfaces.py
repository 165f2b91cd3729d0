"""Protocol definitions for matrix representations (DI-friendly)."""

from __future__ import annotations

from typing import Protocol, runtime_checkable

import numpy as np

from .schemas import GeneratorKind


@runtime_checkable
class RepresentationProtocol(Protocol):
    """Anything that hands out generator matrices of some B_f(x)."""

    @property
    def f(self) -> int: ...
    @property
    def dim(self) -> int: ...
    @property
    def generator_indices(self) -> tuple[int, ...]: ...
    def generator(self, kind: GeneratorKind, i: int) -> np.ndarray: ...
