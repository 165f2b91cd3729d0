"""Subduction grid: nodes <w; w1, w2>, i-layers and the overlap graph."""

from __future__ import annotations

import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product

import networkx as nx

from .errors import AssemblyError, IndexRangeError, SignatureError
from .gt_module import coupling_classes, g_word_action, i_coupled, ibar_coupled, is_ibar_self
from .lattice import Ordering, PermutationLattice, Shape, compare_lattices, dimension, enumerate_lattices
from .schemas import Configuration, CouplingMode, EdgeModel, GridDump, SignatureModel

logger = logging.getLogger(__name__)

_CONFIG_COLORS = {
    Configuration.CROSSING: "white",
    Configuration.HBRIDGE: "lightblue",
    Configuration.VBRIDGE: "palegreen",
    Configuration.SINGLET: "orange",
}


@dataclass(frozen=True)
class Signature:
    """(f, lambda; f1, f2; lambda1, lambda2) of a restriction B_f -> B_f1 x B_f2."""

    f: int
    shape: Shape
    f1: int
    f2: int
    shape1: Shape
    shape2: Shape

    def __post_init__(self) -> None:
        if self.f1 < 1 or self.f2 < 1:
            raise SignatureError(f"split orders must be positive, got f1={self.f1}, f2={self.f2}")
        if self.f1 + self.f2 != self.f:
            raise SignatureError(f"f1 + f2 must equal f ({self.f1} + {self.f2} != {self.f})")
        for order, shape in ((self.f, self.shape), (self.f1, self.shape1), (self.f2, self.shape2)):
            if not shape.in_upsilon(order):
                raise SignatureError(f"{shape} does not label an irrep of B_{order}")

    def __str__(self) -> str:
        return f"({self.f},{self.shape};{self.f1},{self.f2},{self.shape1},{self.shape2})"

    @property
    def legal_indices(self) -> tuple[int, ...]:
        return tuple(range(1, self.f1)) + tuple(range(self.f1 + 1, self.f))

    @property
    def dims(self) -> tuple[int, int, int]:
        return (
            dimension(self.f, self.shape),
            dimension(self.f1, self.shape1),
            dimension(self.f2, self.shape2),
        )

    def to_model(self) -> SignatureModel:
        return SignatureModel(
            f=self.f, shape=str(self.shape), f1=self.f1, f2=self.f2,
            shape1=str(self.shape1), shape2=str(self.shape2),
        )


@dataclass(frozen=True)
class LatticePair:
    w1: PermutationLattice
    w2: PermutationLattice

    def __str__(self) -> str:
        return f"{self.w1},{self.w2}"


@dataclass(frozen=True)
class GridNode:
    w: PermutationLattice
    pair: LatticePair

    @property
    def w1(self) -> PermutationLattice:
        return self.pair.w1

    @property
    def w2(self) -> PermutationLattice:
        return self.pair.w2

    def __str__(self) -> str:
        return f"<{self.w};{self.pair}>"


def _check_pair_index(p: LatticePair, i: int) -> tuple[int, int]:
    f1 = p.w1.order
    f = f1 + p.w2.order
    if not (1 <= i <= f1 - 1 or f1 + 1 <= i <= f - 1):
        raise IndexRangeError(f"index {i} is not a generator of B_{f1} x B_{f - f1}")
    return f1, f


def pair_coupled(p: LatticePair, q: LatticePair, i: int, mode: CouplingMode = CouplingMode.PLAIN) -> bool:
    f1, _ = _check_pair_index(p, i)
    if q.w1.order != f1 or q.w2.order != p.w2.order:
        raise SignatureError(f"pairs {p} and {q} belong to different splits")
    coupled = i_coupled if mode == CouplingMode.PLAIN else ibar_coupled
    if i < f1:
        return p.w2 == q.w2 and coupled(p.w1, q.w1, i)
    return p.w1 == q.w1 and coupled(p.w2, q.w2, i - f1)


def pair_flipped(p: LatticePair, i: int) -> bool:
    f1, _ = _check_pair_index(p, i)
    return is_ibar_self(p.w1, i) if i < f1 else is_ibar_self(p.w2, i - f1)


def pair_g_action(p: LatticePair, i: int) -> LatticePair:
    f1, _ = _check_pair_index(p, i)
    if i < f1:
        return LatticePair(g_word_action(p.w1, i), p.w2)
    return LatticePair(p.w1, g_word_action(p.w2, i - f1))


def _check_nodes(n: GridNode, m: GridNode) -> None:
    if (
        n.w.order != m.w.order or n.w.shape != m.w.shape
        or n.w1.order != m.w1.order or n.w1.shape != m.w1.shape
        or n.w2.order != m.w2.order or n.w2.shape != m.w2.shape
    ):
        raise SignatureError(f"nodes {n} and {m} belong to different grids")


def node_coupled(n: GridNode, m: GridNode, i: int) -> bool:
    _check_nodes(n, m)
    return i_coupled(n.w, m.w, i) and pair_coupled(n.pair, m.pair, i)


def classify_node(n: GridNode, i: int) -> Configuration:
    pair_flip = pair_flipped(n.pair, i)
    w_flip = is_ibar_self(n.w, i)
    if w_flip and pair_flip:
        return Configuration.SINGLET
    if w_flip:
        return Configuration.HBRIDGE
    if pair_flip:
        return Configuration.VBRIDGE
    return Configuration.CROSSING


def compare_nodes(n: GridNode, m: GridNode) -> Ordering:
    _check_nodes(n, m)
    for a, b in ((n.w, m.w), (n.w1, m.w1), (n.w2, m.w2)):
        order = compare_lattices(a, b)
        if order != Ordering.EQUAL:
            return order
    return Ordering.EQUAL


@dataclass(frozen=True, eq=False)
class SubductionGrid:
    """Nodes in canonical order; node index = iw * d1 * d2 + iw1 * d2 + iw2."""

    signature: Signature
    basis: tuple[PermutationLattice, ...]
    basis1: tuple[PermutationLattice, ...]
    basis2: tuple[PermutationLattice, ...]
    nodes: tuple[GridNode, ...]
    layers: dict[int, tuple[tuple[int, ...], ...]] = field(default_factory=dict)
    configurations: dict[int, tuple[Configuration, ...]] = field(default_factory=dict)
    edges: tuple[tuple[int, int, int], ...] = ()

    @property
    def size(self) -> int:
        return len(self.nodes)

    @cached_property
    def index(self) -> dict[GridNode, int]:
        return {n: k for k, n in enumerate(self.nodes)}

    def node_index(self, iw: int, iw1: int, iw2: int) -> int:
        d1, d2 = len(self.basis1), len(self.basis2)
        return (iw * d1 + iw1) * d2 + iw2

    def split_index(self, k: int) -> tuple[int, int, int]:
        d1, d2 = len(self.basis1), len(self.basis2)
        iw, rest = divmod(k, d1 * d2)
        return (iw, *divmod(rest, d2))

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        for k, n in enumerate(self.nodes):
            g.add_node(k, label=str(n))
        for a, b, i in self.edges:
            g.add_edge(a, b, i=i)
        return g

    def layer_graph(self, i: int) -> nx.Graph:
        """Subgraph of edges labelled i; its components are the i-layer classes."""
        g = nx.Graph()
        g.add_nodes_from(range(self.size))
        g.add_edges_from((a, b) for a, b, label in self.edges if label == i)
        return g


def _pair_classes(sig: Signature, i: int) -> list[list[tuple[int, int]]]:
    d1, d2 = dimension(sig.f1, sig.shape1), dimension(sig.f2, sig.shape2)
    if i < sig.f1:
        return [[(a, b) for a in cls] for cls in coupling_classes(sig.f1, sig.shape1, i) for b in range(d2)]
    return [[(a, b) for b in cls] for a in range(d1) for cls in coupling_classes(sig.f2, sig.shape2, i - sig.f1)]


def build_grid(signature: Signature) -> SubductionGrid:
    t0 = time.perf_counter()
    basis = enumerate_lattices(signature.f, signature.shape)
    basis1 = enumerate_lattices(signature.f1, signature.shape1)
    basis2 = enumerate_lattices(signature.f2, signature.shape2)
    nodes = tuple(
        GridNode(w, LatticePair(w1, w2)) for w, w1, w2 in product(basis, basis1, basis2)
    )
    d1, d2 = len(basis1), len(basis2)

    layers: dict[int, tuple[tuple[int, ...], ...]] = {}
    configurations: dict[int, tuple[Configuration, ...]] = {}
    edge_labels: dict[tuple[int, int], int] = {}
    for i in signature.legal_indices:
        classes = []
        for w_cls in coupling_classes(signature.f, signature.shape, i):
            for p_cls in _pair_classes(signature, i):
                classes.append(tuple(sorted((iw * d1 + a) * d2 + b for iw in w_cls for a, b in p_cls)))
        classes.sort(key=lambda c: c[0])
        layers[i] = tuple(classes)
        for cls in classes:
            for a, b in combinations(cls, 2):
                if (a, b) in edge_labels:
                    raise AssemblyError(
                        f"nodes {nodes[a]} and {nodes[b]} coupled at both i={edge_labels[a, b]} and i={i}"
                    )
                edge_labels[a, b] = i
        configurations[i] = tuple(classify_node(n, i) for n in nodes)

    grid = SubductionGrid(
        signature=signature, basis=basis, basis1=basis1, basis2=basis2, nodes=nodes,
        layers=layers, configurations=configurations,
        edges=tuple(sorted((a, b, i) for (a, b), i in edge_labels.items())),
    )
    elapsed = (time.perf_counter() - t0) * 1000
    logger.info(
        f"Grid {signature}: {grid.size} nodes, {len(grid.edges)} edges, "
        f"layers {list(signature.legal_indices)} ({elapsed:.1f}ms)"
    )
    return grid


def histogram(grid: SubductionGrid) -> dict[int, dict[Configuration, int]]:
    """Per-i node counts by configuration; every row sums to the node count."""
    out = {}
    for i, tags in grid.configurations.items():
        counts = Counter(tags)
        out[i] = {c: counts.get(c, 0) for c in Configuration}
    return out


def export_dot(grid: SubductionGrid, layer: int | None = None) -> str:
    """DOT text of the overlap graph; with ``layer`` nodes are filled by their configuration at that i."""
    if layer is not None and layer not in grid.configurations:
        raise IndexRangeError(f"{layer} is not a layer of {grid.signature}")
    lines = [f'graph "{grid.signature}" {{', "  node [shape=box];"]
    for k, n in enumerate(grid.nodes):
        attrs = f'label="{n}"'
        if layer is not None:
            tag = grid.configurations[layer][k]
            attrs += f', style=filled, fillcolor={_CONFIG_COLORS[tag]}, tooltip="{tag.value}"'
        lines.append(f"  n{k} [{attrs}];")
    for a, b, i in grid.edges:
        lines.append(f'  n{a} -- n{b} [label="{i}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def grid_dump(grid: SubductionGrid) -> GridDump:
    return GridDump(
        signature=grid.signature.to_model(),
        nodes=[str(n) for n in grid.nodes],
        edges=[EdgeModel(source=a, target=b, i=i) for a, b, i in grid.edges],
        configurations={str(i): list(tags) for i, tags in grid.configurations.items()},
        histogram={str(i): row for i, row in histogram(grid).items()},
    )
