"""Unit tests for Omega assembly, the nullspace solve and the multiplicity oracles."""

from __future__ import annotations

from itertools import product

import numpy as np
import pytest

from brauersdc.errors import AssemblyError
from brauersdc.grid import Signature, build_grid
from brauersdc.gt_module import gated_module
from brauersdc.lattice import Shape, partitions, upsilon
from brauersdc.solver import assemble, completeness_check, load_modules, lr_coefficient, solve
from brauersdc.young import RationalParam

X = RationalParam.parse("7/2")
EMPTY = Shape(())
ONE = Shape((1,))


def _solve(sig: Signature, x: RationalParam = X):
    grid = build_grid(sig)
    system = assemble(grid, load_modules(sig, x))
    return system, solve(system)


# --- LR oracle ---


@pytest.mark.parametrize(
    "shape,shape1,shape2,expected",
    [
        ((2, 1), (2,), (1,), 1),
        ((2, 1), (1, 1), (1,), 1),
        ((3,), (1, 1), (1,), 0),
        ((2, 1), (1,), (2,), 1),
        ((3, 2, 1), (2, 1), (2, 1), 2),
        ((2,), (2,), (), 1),
        ((2,), (1,), (1, 1), 0),
    ],
)
def test_lr_coefficient(shape, shape1, shape2, expected):
    assert lr_coefficient(Shape(shape), Shape(shape1), Shape(shape2)) == expected


# --- Assembly ---


def test_assembly_blocks_and_sparsity():
    sig = Signature(3, ONE, 2, 1, EMPTY, ONE)
    system, _ = _solve(sig)
    assert system.omega.shape[1] == 3
    assert [b.label for b in system.blocks] == ["g1", "e1"]
    assert system.block("e1").shape[0] == 2
    with pytest.raises(KeyError):
        system.block("g2")


def test_assembly_rejects_mismatched_modules():
    sig = Signature(3, ONE, 2, 1, EMPTY, ONE)
    _, first, second = load_modules(sig, X)
    bigger = gated_module(4, Shape((2,)), X)
    with pytest.raises(AssemblyError):
        assemble(build_grid(sig), (bigger, first, second))


# --- Nullspace ---


def test_vbridge_nodes_vanish():
    _, basis = _solve(Signature(3, ONE, 2, 1, EMPTY, ONE))
    assert basis.multiplicity == 1
    np.testing.assert_allclose(basis.column(0), [1.0, 0.0, 0.0], atol=1e-12)
    assert basis.residual < 1e-9
    assert not basis.ambiguous


@pytest.mark.parametrize("shape1", [EMPTY, Shape((2,)), Shape((1, 1))])
def test_order_three_multiplicity_one(shape1):
    _, basis = _solve(Signature(3, ONE, 2, 1, shape1, ONE))
    assert basis.multiplicity == 1


def test_stable_case_matches_lr():
    _, basis = _solve(Signature(3, Shape((2, 1)), 2, 1, Shape((2,)), ONE), RationalParam.parse(5))
    assert basis.multiplicity == 1


def _full_box_signatures(max_f: int):
    for f in range(2, max_f + 1):
        for f1 in range(1, f):
            for shape, s1, s2 in product(partitions(f), partitions(f1), partitions(f - f1)):
                yield Signature(f, shape, f1, f - f1, s1, s2)


@pytest.mark.parametrize("sig", list(_full_box_signatures(5)), ids=str)
def test_full_box_multiplicity_is_lr(sig):
    _, basis = _solve(sig)
    assert basis.multiplicity == lr_coefficient(sig.shape, sig.shape1, sig.shape2)
    assert basis.residual < 1e-9


def test_solution_columns_are_orthonormal():
    _, basis = _solve(Signature(4, EMPTY, 2, 2, EMPTY, EMPTY))
    gram = basis.vectors.T @ basis.vectors
    np.testing.assert_allclose(gram, np.eye(basis.multiplicity), atol=1e-12)


def test_empty_omega_gives_identity_basis():
    _, basis = _solve(Signature(2, Shape((2,)), 1, 1, ONE, ONE))
    assert basis.multiplicity == 1
    np.testing.assert_allclose(basis.vectors, [[1.0]])


# --- Completeness ---


@pytest.mark.parametrize("f", [2, 3, 4])
def test_completeness_identity(f):
    for f1 in range(1, f):
        for shape in upsilon(f):
            report = completeness_check(f, shape, f1, f - f1, X)
            assert report.passed, (f, str(shape), f1, report.rows)
            assert not report.ambiguous


@pytest.mark.parametrize("x", ["5", "6"])
@pytest.mark.parametrize("f", [2, 3, 4])
def test_multiplicity_independent_of_x(f, x):
    param = RationalParam.parse(x)
    for f1 in range(1, f):
        for shape in upsilon(f):
            report = completeness_check(f, shape, f1, f - f1, param)
            reference = completeness_check(f, shape, f1, f - f1, X)
            assert report.passed, (f, str(shape), f1, x)
            assert [row[2] for row in report.rows] == [row[2] for row in reference.rows]


def test_completeness_dump():
    report = completeness_check(3, ONE, 2, 1, X)
    dump = report.to_model()
    assert dump.total == dump.dimension == 3
    assert [r.multiplicity for r in dump.rows] == [1, 1, 1]
