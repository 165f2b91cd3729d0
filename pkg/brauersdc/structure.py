"""Layer-by-layer cross-checks of a solved subduction system.

The production path is the global nullspace of Omega. The passes here
re-derive what each i-layer configuration predicts, from Young-level
quantities (Jucys-Murphy diamonds and P_lambda ratios) rather than from the
module matrices, and compare the prediction with the solved coefficients:

* bridge kernels: on a bridge node the e_i row reduces to a weighted sum
  over the i-bar class that has to vanish;
* bridge propagation: the g_i row recovers chi at the swapped lattice from
  chi at the bridge node and its i-bar class;
* crossing recursion: the two-term recursion between w, g_i w and g_i w12;
* singlets: the restriction of a solution to a singlet class lies in the
  kernels of the g- and e-intertwiners, whose kernels are spanned by
  tensor products of matched eigenvectors.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .diagnostics import ResidualTracker, VerificationReport
from .gt_module import coupling_classes, g_word_action, ibar_e_entry, ibar_g_entry
from .grid import GridNode, LatticePair, SubductionGrid, pair_g_action
from .lattice import PermutationLattice, enumerate_lattices
from .schemas import Configuration, GeneratorKind
from .solver import SolutionBasis, SubductionSystem
from .young import RationalParam, jm_diamond

logger = logging.getLogger(__name__)


# --- Young-level quantities ---

def _local(pair: LatticePair, i: int, f1: int) -> tuple[PermutationLattice, int]:
    return (pair.w1, i) if i < f1 else (pair.w2, i - f1)


def _d(w: PermutationLattice, i: int, x: RationalParam) -> Fraction:
    return jm_diamond(w, w, i, x)


def _beta(w: PermutationLattice, i: int, x: RationalParam) -> float:
    """Off-diagonal crossing entry; zero when g_i fixes w."""
    if g_word_action(w, i) == w:
        return 0.0
    d = _d(w, i, x)
    return math.sqrt(float(1 - 1 / (d * d)))


def _ibar_class(w: PermutationLattice, i: int) -> list[PermutationLattice]:
    basis = enumerate_lattices(w.order, w.shape)
    for cls in coupling_classes(w.order, w.shape, i):
        members = [basis[k] for k in cls]
        if w in members:
            return members
    return [w]


class _Chi:
    """Lookup of one solution vector by lattices."""

    def __init__(self, system: SubductionSystem, vector: np.ndarray):
        self._grid = system.grid
        self._index = (system.module.index, system.module1.index, system.module2.index)
        self._vector = vector

    def __call__(self, w: PermutationLattice, pair: LatticePair) -> float:
        iw = self._index[0][w]
        return float(self._vector[self._grid.node_index(iw, self._index[1][pair.w1], self._index[2][pair.w2])])


def _columns(basis: SolutionBasis) -> list[np.ndarray]:
    return [basis.column(eta) for eta in range(basis.multiplicity)]


def _nodes_with(grid: SubductionGrid, i: int, tag: Configuration) -> list[GridNode]:
    return [n for n, t in zip(grid.nodes, grid.configurations[i]) if t == tag]


# --- Bridges ---

def verify_bridge_kernels(sys: SubductionSystem, basis: SolutionBasis, tol: float = 1e-8) -> VerificationReport:
    """Sum over the i-bar class weighted by sqrt(P) must vanish on every bridge node."""
    grid, x, f1 = sys.grid, sys.x, sys.signature.f1
    tracker = ResidualTracker(tol)
    for vector in _columns(basis):
        chi = _Chi(sys, vector)
        for i in sys.signature.legal_indices:
            for node in _nodes_with(grid, i, Configuration.HBRIDGE):
                total = sum(ibar_e_entry(node.w, u, i, x) * chi(u, node.pair) for u in _ibar_class(node.w, i))
                tracker.record("hbridge_kernel", abs(total))
            for node in _nodes_with(grid, i, Configuration.VBRIDGE):
                lat, li = _local(node.pair, i, f1)
                total = 0.0
                for v in _ibar_class(lat, li):
                    other = LatticePair(v, node.w2) if i < f1 else LatticePair(node.w1, v)
                    total += ibar_e_entry(lat, v, li, x) * chi(node.w, other)
                tracker.record("vbridge_kernel", abs(total))
    report = tracker.report("bridge_kernels")
    logger.debug(f"Bridge kernels for {sys.signature}: {report.checks} checks, max {report.residual:.2e}")
    return report


def verify_bridge_propagation(sys: SubductionSystem, basis: SolutionBasis, tol: float = 1e-8) -> VerificationReport:
    """Recover chi at g_i-images through the g_i row and compare with the solved values."""
    grid, x, f1 = sys.grid, sys.x, sys.signature.f1
    tracker = ResidualTracker(tol)
    for vector in _columns(basis):
        chi = _Chi(sys, vector)
        for i in sys.signature.legal_indices:
            for node in _nodes_with(grid, i, Configuration.HBRIDGE):
                _propagate_hbridge(chi, node, i, f1, x, tracker)
            for node in _nodes_with(grid, i, Configuration.VBRIDGE):
                _propagate_vbridge(chi, node, i, f1, x, tracker)
            for node in _nodes_with(grid, i, Configuration.CROSSING):
                _crossing_recursion(chi, node, i, f1, x, tracker)
    report = tracker.report("bridge_propagation")
    if tracker.skipped:
        logger.debug(f"Propagation for {sys.signature}: {tracker.skipped} fixed-point steps skipped")
    return report


def _propagate_hbridge(
    chi: _Chi, node: GridNode, i: int, f1: int, x: RationalParam, tracker: ResidualTracker
) -> None:
    w, pair = node.w, node.pair
    lat, li = _local(pair, i, f1)
    image = pair_g_action(pair, i)
    # g_i row on the module side, through the exact i-bar entries
    row = sum(ibar_g_entry(w, u, i, x) * chi(u, pair) for u in _ibar_class(w, i))
    rest = row - float(1 / _d(lat, li, x)) * chi(w, pair)
    beta = _beta(lat, li, x)
    if image == pair:
        tracker.record("hbridge_fixed", abs(rest))
        return
    if beta == 0.0:
        tracker.skip("hbridge", f"beta vanishes at {pair}, i={i}")
        return
    tracker.record("hbridge", abs(rest / beta - chi(w, image)))


def _propagate_vbridge(
    chi: _Chi, node: GridNode, i: int, f1: int, x: RationalParam, tracker: ResidualTracker
) -> None:
    w, pair = node.w, node.pair
    lat, li = _local(pair, i, f1)
    image = g_word_action(w, i)
    row = 0.0
    for v in _ibar_class(lat, li):
        other = LatticePair(v, pair.w2) if i < f1 else LatticePair(pair.w1, v)
        row += ibar_g_entry(lat, v, li, x) * chi(w, other)
    rest = row - float(1 / _d(w, i, x)) * chi(w, pair)
    beta = _beta(w, i, x)
    if image == w:
        tracker.record("vbridge_fixed", abs(rest))
        return
    if beta == 0.0:
        tracker.skip("vbridge", f"beta vanishes at {w}, i={i}")
        return
    tracker.record("vbridge", abs(rest / beta - chi(image, pair)))


def _crossing_recursion(
    chi: _Chi, node: GridNode, i: int, f1: int, x: RationalParam, tracker: ResidualTracker
) -> None:
    w, pair = node.w, node.pair
    lat, li = _local(pair, i, f1)
    w_image, p_image = g_word_action(w, i), pair_g_action(pair, i)
    if w_image == w and p_image == pair:
        tracker.skip("crossing", "g_i fixes both w and w12")
        return
    alpha = float(1 / _d(lat, li, x) - 1 / _d(w, i, x))
    residual = (
        alpha * chi(w, pair)
        - _beta(w, i, x) * chi(w_image, pair)
        + _beta(lat, li, x) * chi(w, p_image)
    )
    tracker.record("crossing", abs(residual))


# --- Singlets ---

@dataclass(frozen=True)
class SingletClass:
    i: int
    size: tuple[int, int]
    g_kernel: int
    e_kernel: int
    intersection: int
    restricted_rank: int


@dataclass(frozen=True)
class SingletReport(VerificationReport):
    classes: tuple[SingletClass, ...] = ()


def _null_dim(a: np.ndarray, rank_tol: float) -> int:
    if a.size == 0:
        return a.shape[1]
    s = np.linalg.svd(a, compute_uv=False)
    if not s.size or s[0] == 0:
        return a.shape[1]
    return a.shape[1] - int(np.sum(s > s[0] * rank_tol))


def _matched_kernel(rho_w: np.ndarray, rho_p: np.ndarray, split: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenvalues of both factors and the matched eigenvector products (columns)."""
    vals_w, vecs_w = np.linalg.eigh(rho_w)
    vals_p, vecs_p = np.linalg.eigh(rho_p)
    products = [
        np.kron(vecs_w[:, a], vecs_p[:, b])
        for a in range(len(vals_w))
        for b in range(len(vals_p))
        if (vals_w[a] > split) == (vals_p[b] > split)
    ]
    k = np.array(products).T if products else np.zeros((len(vals_w) * len(vals_p), 0))
    return vals_w, vals_p, k


def verify_singlet_structure(
    sys: SubductionSystem, basis: SolutionBasis, tol: float = 1e-8, rank_tol: float = 1e-10
) -> SingletReport:
    grid, x = sys.grid, float(sys.x)
    module, split = sys.module, sys.split
    d2 = len(grid.basis2)
    tracker = ResidualTracker(tol)
    classes = []
    for i in sys.signature.legal_indices:
        for cls in grid.layers[i]:
            if grid.configurations[i][cls[0]] != Configuration.SINGLET:
                continue
            parts = [grid.split_index(k) for k in cls]
            rows = sorted({iw for iw, _, _ in parts})
            cols = sorted({iw1 * d2 + iw2 for _, iw1, iw2 in parts})
            m, n = len(rows), len(cols)
            kernels = {}
            stacked = []
            for kind, values, split_at in ((GeneratorKind.G, (-1.0, 1.0), 0.0), (GeneratorKind.E, (0.0, x), x / 2)):
                rho_w = module.generator(kind, i)[np.ix_(rows, rows)]
                rho_p = split.generator(kind, i)[np.ix_(cols, cols)]
                vals_w, vals_p, products = _matched_kernel(rho_w, rho_p, split_at)
                spectrum = np.concatenate([vals_w, vals_p])
                tracker.record(
                    f"{kind.value}_spectrum",
                    float(np.max(np.min(np.abs(spectrum[:, None] - np.array(values)[None, :]), axis=1))),
                )
                intertwiner = np.kron(rho_w, np.eye(n)) - np.kron(np.eye(m), rho_p)
                stacked.append(intertwiner)
                kernel_dim = _null_dim(intertwiner, rank_tol)
                kernels[kind] = kernel_dim
                tracker.record(f"{kind.value}_kernel_span", float(np.abs(intertwiner @ products).max(initial=0.0)))
                tracker.record(f"{kind.value}_kernel_dim", float(abs(kernel_dim - products.shape[1])), 0.0)

            restricted = np.array(
                [[vec[grid.node_index(r, *divmod(c, d2))] for r in rows for c in cols] for vec in _columns(basis)]
            ).reshape(basis.multiplicity, m * n).T
            for intertwiner in stacked:
                tracker.record("restriction", float(np.abs(intertwiner @ restricted).max(initial=0.0)))
            intersection = _null_dim(np.vstack(stacked), rank_tol)
            restricted_rank = (
                int(np.linalg.matrix_rank(restricted, tol=1e-8)) if restricted.size else 0
            )
            tracker.record("intersection_rank", float(max(0, restricted_rank - intersection)), 0.0)
            classes.append(
                SingletClass(
                    i=i, size=(m, n), g_kernel=kernels[GeneratorKind.G], e_kernel=kernels[GeneratorKind.E],
                    intersection=intersection, restricted_rank=restricted_rank,
                )
            )
    base = tracker.report("singlet_structure")
    return SingletReport(name=base.name, records=base.records, notes=base.notes, classes=tuple(classes))
