"""Subduction matrix assembly and its numerical nullspace.

For a grid <w; w1, w2> the unknowns chi(w; w1, w2) are the entries of a
d x (d1 d2) matrix X (row w, column iw1 * d2 + iw2). Every subalgebra
generator a contributes the intertwining equations rho(a) X = X rho_split(a),
one g-row and one e-row per (node, legal i). The stacked system is Omega.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from .errors import AssemblyError
from .gt_module import GTModule, SplitRepresentation, coupling_classes, g_word_action, gated_module, is_ibar_self
from .grid import Signature, SubductionGrid, build_grid, classify_node
from .interfaces import RepresentationProtocol
from .lattice import Shape, dimension, upsilon
from .schemas import CompletenessDump, CompletenessRow, GeneratorKind
from .young import RationalParam

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RowBlock:
    i: int
    kind: GeneratorKind
    start: int
    stop: int

    @property
    def label(self) -> str:
        return f"{self.kind.value}{self.i}"


@dataclass(frozen=True, eq=False)
class SubductionSystem:
    grid: SubductionGrid
    module: GTModule
    module1: GTModule
    module2: GTModule
    omega: csr_matrix
    blocks: tuple[RowBlock, ...] = ()

    @property
    def signature(self) -> Signature:
        return self.grid.signature

    @property
    def x(self) -> RationalParam:
        return self.module.x

    @property
    def split(self) -> RepresentationProtocol:
        return SplitRepresentation(self.module1, self.module2)

    def block(self, label: str) -> csr_matrix:
        for b in self.blocks:
            if b.label == label:
                return self.omega[b.start : b.stop]
        raise KeyError(label)


def load_modules(signature: Signature, x: RationalParam, tol: float = 1e-9) -> tuple[GTModule, GTModule, GTModule]:
    """The three relation-gated modules [f, lambda], [f1, lambda1], [f2, lambda2]."""
    return (
        gated_module(signature.f, signature.shape, x, tol),
        gated_module(signature.f1, signature.shape1, x, tol),
        gated_module(signature.f2, signature.shape2, x, tol),
    )


def _class_lookup(f: int, shape: Shape, i: int) -> dict[int, tuple[int, ...]]:
    return {k: cls for cls in coupling_classes(f, shape, i) for k in cls}


def _validate_sparsity(module: GTModule, i: int, lookup: dict[int, tuple[int, ...]]) -> None:
    mask = np.zeros((module.dim, module.dim), dtype=bool)
    for k, cls in lookup.items():
        mask[k, list(cls)] = True
    for kind in GeneratorKind:
        leak = np.abs(module.generator(kind, i)[~mask])
        if leak.size and leak.max() > 0:
            raise AssemblyError(
                f"{kind.value}_{i} of [{module.f},{module.shape}] has entries outside its coupling classes"
            )
    for k, w in enumerate(module.basis):
        if not is_ibar_self(w, i):
            expected = {w, g_word_action(w, i)}
            members = {module.basis[c] for c in lookup[k]}
            if members != expected:
                raise AssemblyError(f"crossing class of {w} at i={i} is {sorted(map(str, members))}")


def _rows_for(
    grid: SubductionGrid,
    module: RepresentationProtocol,
    factor: RepresentationProtocol,
    i: int,
    local: int,
    kind: GeneratorKind,
    left: dict[int, tuple[int, ...]],
    right: dict[int, tuple[int, ...]],
    first_factor: bool,
) -> Iterator[dict[int, float]]:
    rho = module.generator(kind, i)
    rho_s = factor.generator(kind, local)
    d1, d2 = len(grid.basis1), len(grid.basis2)
    for iw, iw1, iw2 in product(range(module.dim), range(d1), range(d2)):
        row: dict[int, float] = {}
        for iu in left[iw]:
            col = grid.node_index(iu, iw1, iw2)
            row[col] = row.get(col, 0.0) + rho[iw, iu]
        if first_factor:
            for iv in right[iw1]:
                col = grid.node_index(iw, iv, iw2)
                row[col] = row.get(col, 0.0) - rho_s[iv, iw1]
        else:
            for iv in right[iw2]:
                col = grid.node_index(iw, iw1, iv)
                row[col] = row.get(col, 0.0) - rho_s[iv, iw2]
        yield {c: v for c, v in row.items() if v != 0.0}


def assemble(grid: SubductionGrid, modules: tuple[GTModule, GTModule, GTModule]) -> SubductionSystem:
    """Stack the g- and e-equations of every legal i; all-zero rows are dropped."""
    t0 = time.perf_counter()
    module, module1, module2 = modules
    sig = grid.signature
    if (module.dim, module1.dim, module2.dim) != (len(grid.basis), len(grid.basis1), len(grid.basis2)):
        raise AssemblyError(f"module dimensions do not match grid {sig}")

    rows: list[int] = []
    cols: list[int] = []
    data: list[float] = []
    blocks: list[RowBlock] = []
    n_rows = 0
    for i in sig.legal_indices:
        first_factor = i < sig.f1
        factor, local = (module1, i) if first_factor else (module2, i - sig.f1)
        left = _class_lookup(sig.f, sig.shape, i)
        right = _class_lookup(factor.f, factor.shape, local)
        _validate_sparsity(module, i, left)
        _validate_sparsity(factor, local, right)
        for k, node in enumerate(grid.nodes):
            if classify_node(node, i) != grid.configurations[i][k]:
                raise AssemblyError(f"configuration tag of {node} at i={i} disagrees with its lattices")
        for kind in GeneratorKind:
            start = n_rows
            for entries in _rows_for(grid, module, factor, i, local, kind, left, right, first_factor):
                if not entries:
                    continue
                for c, v in sorted(entries.items()):
                    rows.append(n_rows)
                    cols.append(c)
                    data.append(v)
                n_rows += 1
            blocks.append(RowBlock(i=i, kind=kind, start=start, stop=n_rows))

    omega = coo_matrix((data, (rows, cols)), shape=(n_rows, grid.size)).tocsr()
    elapsed = (time.perf_counter() - t0) * 1000
    logger.info(f"Assembled Omega for {sig}: {n_rows}x{grid.size}, nnz={omega.nnz} ({elapsed:.1f}ms)")
    return SubductionSystem(
        grid=grid, module=module, module1=module1, module2=module2,
        omega=omega, blocks=tuple(blocks),
    )


# --- Nullspace ---

@dataclass(frozen=True, eq=False)
class SolutionBasis:
    vectors: np.ndarray  # (nodes, multiplicity), orthonormal columns
    multiplicity: int
    singular_values: tuple[float, ...] = ()
    threshold: float = 0.0
    ambiguous: bool = False
    residual: float = 0.0
    block_residuals: dict[str, float] = field(default_factory=dict)

    def column(self, eta: int) -> np.ndarray:
        return self.vectors[:, eta]


def _orient(vectors: np.ndarray, rel: float = 1e-9) -> np.ndarray:
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        scale = np.abs(col).max(initial=0.0)
        lead = np.flatnonzero(np.abs(col) > rel * scale)
        if lead.size and col[lead[0]] < 0:
            out[:, k] = -col
    return out


def solve(sys: SubductionSystem, rank_tol: float = 1e-10, rank_gap: float = 10.0) -> SolutionBasis:
    """Nullspace of Omega by full SVD.

    Singular values <= rank_tol * s_max count as zero. A singular value within
    a factor rank_gap of that threshold marks the rank decision as ambiguous.
    """
    t0 = time.perf_counter()
    n = sys.grid.size
    if sys.omega.shape[0] == 0:
        vectors = np.eye(n)
        return SolutionBasis(vectors=vectors, multiplicity=n)

    dense = sys.omega.toarray()
    _, s, vh = np.linalg.svd(dense, full_matrices=True)
    threshold = float(s[0]) * rank_tol if s.size else 0.0
    rank = int(np.sum(s > threshold))
    ambiguous = bool(np.any((s >= threshold / rank_gap) & (s <= threshold * rank_gap))) if threshold > 0 else False
    vectors = _orient(vh[rank:].T)
    multiplicity = vectors.shape[1]

    block_residuals = {}
    for b in sys.blocks:
        part = dense[b.start : b.stop] @ vectors
        block_residuals[b.label] = float(np.abs(part).max(initial=0.0))
    residual = max(block_residuals.values(), default=0.0)

    elapsed = (time.perf_counter() - t0) * 1000
    logger.info(
        f"Solved {sys.signature} at x={sys.x}: rank={rank}, multiplicity={multiplicity}, "
        f"residual={residual:.2e} ({elapsed:.1f}ms)"
    )
    if ambiguous:
        logger.warning(f"Rank decision for {sys.signature} is ambiguous near threshold {threshold:.3e}")
    return SolutionBasis(
        vectors=vectors,
        multiplicity=multiplicity,
        singular_values=tuple(float(v) for v in s),
        threshold=threshold,
        ambiguous=ambiguous,
        residual=residual,
        block_residuals=block_residuals,
    )


# --- Multiplicity oracles ---

def lr_coefficient(shape: Shape, shape1: Shape, shape2: Shape) -> int:
    """c^shape_{shape1, shape2} by brute-force enumeration of LR skew tableaux.

    Counts fillings of shape/shape1 with content shape2 that are semistandard
    and whose reverse reading word is a lattice word.
    """
    if shape.boxes != shape1.boxes + shape2.boxes or not shape.includes(shape1):
        return 0
    cells = [(i, j) for i, j in shape.cells() if not shape1.contains(i, j)]
    letters = shape2.length
    filling: dict[tuple[int, int], int] = {}
    remaining = list(shape2.rows)

    def is_lattice_word() -> bool:
        counts = [0] * (letters + 1)
        for i in range(1, shape.length + 1):
            for j in range(shape.row(i), 0, -1):
                if (i, j) not in filling:
                    continue
                v = filling[i, j]
                counts[v] += 1
                if v > 1 and counts[v] > counts[v - 1]:
                    return False
        return True

    def fill(k: int) -> int:
        if k == len(cells):
            return 1 if is_lattice_word() else 0
        i, j = cells[k]
        low = max(filling.get((i, j - 1), 1), filling.get((i - 1, j), 0) + 1)
        total = 0
        for v in range(low, letters + 1):
            if remaining[v - 1] == 0:
                continue
            filling[i, j] = v
            remaining[v - 1] -= 1
            total += fill(k + 1)
            remaining[v - 1] += 1
            del filling[i, j]
        return total

    return fill(0)


@dataclass(frozen=True)
class CompletenessReport:
    f: int
    shape: Shape
    f1: int
    f2: int
    x: RationalParam
    dimension: int
    rows: tuple[tuple[Shape, Shape, int, int, int], ...] = ()
    ambiguous: bool = False

    @property
    def total(self) -> int:
        return sum(mu * d1 * d2 for _, _, mu, d1, d2 in self.rows)

    @property
    def passed(self) -> bool:
        return self.total == self.dimension

    def to_model(self) -> CompletenessDump:
        return CompletenessDump(
            f=self.f, shape=str(self.shape), f1=self.f1, f2=self.f2, x=str(self.x),
            dimension=self.dimension, total=self.total, passed=self.passed,
            rows=[
                CompletenessRow(shape1=str(s1), shape2=str(s2), multiplicity=mu, dim1=d1, dim2=d2)
                for s1, s2, mu, d1, d2 in self.rows
            ],
        )


def split_signatures(f: int, shape: Shape, f1: int, f2: int) -> list[Signature]:
    """Every (lambda1, lambda2) in the label sets of B_f1 x B_f2."""
    return [Signature(f, shape, f1, f2, s1, s2) for s1, s2 in product(upsilon(f1), upsilon(f2))]


def completeness_check(
    f: int,
    shape: Shape,
    f1: int,
    f2: int,
    x: RationalParam,
    rank_tol: float = 1e-10,
    rank_gap: float = 10.0,
    relation_tol: float = 1e-9,
) -> CompletenessReport:
    """sum of mu * d1 * d2 over all split labels must equal dim [f, lambda]."""
    rows = []
    ambiguous = False
    for sig in split_signatures(f, shape, f1, f2):
        grid = build_grid(sig)
        basis = solve(assemble(grid, load_modules(sig, x, relation_tol)), rank_tol, rank_gap)
        ambiguous = ambiguous or basis.ambiguous
        _, d1, d2 = sig.dims
        rows.append((sig.shape1, sig.shape2, basis.multiplicity, d1, d2))
    report = CompletenessReport(
        f=f, shape=shape, f1=f1, f2=f2, x=x,
        dimension=dimension(f, shape), rows=tuple(rows), ambiguous=ambiguous,
    )
    if not report.passed:
        logger.warning(f"Completeness fails for ({f},{shape};{f1},{f2}): {report.total} != {report.dimension}")
    return report
