"""Unit tests for the subduction grid and its layers."""

from __future__ import annotations

from itertools import product

import networkx as nx
import pytest

from brauersdc.errors import IndexRangeError, SignatureError
from brauersdc.grid import (
    GridNode,
    LatticePair,
    Signature,
    build_grid,
    classify_node,
    export_dot,
    grid_dump,
    histogram,
    node_coupled,
    pair_coupled,
    pair_g_action,
)
from brauersdc.lattice import PermutationLattice, Shape, upsilon
from brauersdc.schemas import Configuration, CouplingMode

EMPTY = Shape(())
ONE = Shape((1,))


def _signatures(max_f: int):
    for f in range(2, max_f + 1):
        for f1 in range(1, f):
            f2 = f - f1
            for shape, s1, s2 in product(upsilon(f), upsilon(f1), upsilon(f2)):
                yield Signature(f, shape, f1, f2, s1, s2)


ALL_SIGNATURES = list(_signatures(4))


# --- Signature ---


def test_signature_format():
    assert str(Signature(3, ONE, 2, 1, EMPTY, ONE)) == "(3,[1];2,1,[],[1])"


def test_signature_validation():
    with pytest.raises(SignatureError):
        Signature(3, ONE, 2, 2, EMPTY, ONE)
    with pytest.raises(SignatureError):
        Signature(3, ONE, 3, 0, ONE, EMPTY)
    with pytest.raises(SignatureError):
        Signature(3, ONE, 2, 1, ONE, ONE)


def test_legal_indices_skip_the_split():
    assert Signature(4, EMPTY, 2, 2, EMPTY, EMPTY).legal_indices == (1, 3)
    assert Signature(2, Shape((2,)), 1, 1, ONE, ONE).legal_indices == ()


# --- Pairs and nodes ---


def test_pair_coupling_and_action():
    p = LatticePair(PermutationLattice((1, -1)), PermutationLattice((1, 1)))
    q = LatticePair(PermutationLattice((1, 1)), PermutationLattice((1, 1)))
    assert pair_coupled(p, p, 3)
    assert not pair_coupled(p, q, 3)
    with pytest.raises(IndexRangeError):
        pair_coupled(p, p, 2)
    assert pair_coupled(p, p, 1, CouplingMode.BAR)
    assert pair_g_action(p, 3) == p


def test_classify_order_three():
    grid = build_grid(Signature(3, ONE, 2, 1, EMPTY, ONE))
    assert [str(n) for n in grid.nodes] == ["<(1,-1,1);(1,-1),(1)>", "<(1,1,-1);(1,-1),(1)>", "<(1,2,-2);(1,-1),(1)>"]
    assert grid.configurations[1] == (Configuration.SINGLET, Configuration.VBRIDGE, Configuration.VBRIDGE)


def test_stable_grid_has_no_ibar_nodes():
    grid = build_grid(Signature(4, Shape((2, 1, 1)), 3, 1, Shape((2, 1)), ONE))
    for tags in grid.configurations.values():
        assert set(tags) == {Configuration.CROSSING}


def test_single_node_grid():
    grid = build_grid(Signature(2, Shape((2,)), 1, 1, ONE, ONE))
    assert grid.size == 1
    assert grid.edges == ()


def test_node_index_round_trip():
    grid = build_grid(Signature(4, Shape((2,)), 2, 2, Shape((2,)), EMPTY))
    for k in range(grid.size):
        assert grid.node_index(*grid.split_index(k)) == k


# --- Grid invariants ---


@pytest.mark.parametrize("sig", ALL_SIGNATURES, ids=str)
def test_grid_structure(sig):
    grid = build_grid(sig)
    d, d1, d2 = sig.dims
    assert grid.size == d * d1 * d2
    for i in sig.legal_indices:
        members = sorted(k for cls in grid.layers[i] for k in cls)
        assert members == list(range(grid.size))
        assert len(grid.configurations[i]) == grid.size
        for cls in grid.layers[i]:
            for a in cls:
                for b in cls:
                    assert node_coupled(grid.nodes[a], grid.nodes[b], i)
        components = sorted(tuple(sorted(c)) for c in nx.connected_components(grid.layer_graph(i)))
        assert components == sorted(grid.layers[i])
    for row in histogram(grid).values():
        assert sum(row.values()) == grid.size
    labels = {(a, b) for a, b, _ in grid.edges}
    assert len(labels) == len(grid.edges)


def test_configuration_matches_lattice_flips():
    sig = Signature(4, EMPTY, 2, 2, EMPTY, EMPTY)
    grid = build_grid(sig)
    n = grid.nodes[0]
    assert isinstance(n, GridNode)
    assert classify_node(n, 1) == grid.configurations[1][0]
    assert grid.configurations[1][0] == Configuration.SINGLET


# --- Export ---


def test_graph_attributes():
    grid = build_grid(Signature(3, ONE, 1, 2, ONE, EMPTY))
    g = grid.graph
    assert g.number_of_nodes() == 3
    assert g.number_of_edges() == 3
    assert all(data["i"] == 2 for _, _, data in g.edges(data=True))
    assert g.nodes[0]["label"] == str(grid.nodes[0])


def test_export_dot():
    grid = build_grid(Signature(3, ONE, 1, 2, ONE, EMPTY))
    text = export_dot(grid, layer=2)
    assert text.startswith('graph "(3,[1];1,2,[1],[])" {')
    assert 'n0 -- n1 [label="2"];' in text
    assert "fillcolor=orange" in text
    with pytest.raises(IndexRangeError):
        export_dot(grid, layer=1)


def test_grid_dump_model():
    grid = build_grid(Signature(3, ONE, 2, 1, EMPTY, ONE))
    dump = grid_dump(grid)
    assert dump.nodes[0] == "<(1,-1,1);(1,-1),(1)>"
    assert dump.histogram["1"][Configuration.VBRIDGE] == 2
