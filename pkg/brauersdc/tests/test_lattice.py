"""Unit tests for words, lattices and shapes."""

from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from brauersdc.errors import IndexRangeError, InvalidWordError, ShapeError
from brauersdc.lattice import (
    Ordering,
    PermutationLattice,
    Shape,
    all_lattices,
    compare_lattices,
    counting,
    dimension,
    enumerate_lattices,
    is_lattice,
    level_shape,
    prefix,
    transpose,
    upsilon,
)


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2))


SMALL_LATTICES = [w for f in range(0, 7) for w in all_lattices(f)]


# --- Shapes ---


def test_shape_parse_and_format():
    assert Shape.parse("[2,1]") == Shape((2, 1))
    assert Shape.parse(" [ ] ") == Shape(())
    assert str(Shape((3, 1, 1))) == "[3,1,1]"
    assert str(Shape(())) == "[]"


@pytest.mark.parametrize("text", ["[1,2]", "[0]", "2,1", "[a]"])
def test_shape_parse_rejects(text):
    with pytest.raises(ShapeError):
        Shape.parse(text)


def test_shape_conjugate_and_corners():
    s = Shape((3, 1))
    assert s.conjugate() == Shape((2, 1, 1))
    assert s.addable_rows() == [1, 2, 3]
    assert s.removable_rows() == [1, 2]
    assert s.hook(1, 1) == 4


def test_upsilon_parity():
    assert upsilon(2) == (Shape((2,)), Shape((1, 1)), Shape(()))
    assert not Shape((2,)).in_upsilon(3)
    assert Shape((1,)).in_upsilon(3)


# --- Words ---


def test_counting_signed():
    word = (1, 1, 2, -1)
    assert counting(word, 1) == 1
    assert counting(word, -1) == -1
    assert counting(word, 2) == 1
    assert counting(word, 3) == 0


def test_order_seven_word_validates():
    w = PermutationLattice((1, 1, 2, -1, 1, -2, 2))
    assert w.shape == Shape((2, 1))
    assert w.order == 7


def test_chain_failure_reported_at_prefix_five():
    with pytest.raises(InvalidWordError) as exc:
        PermutationLattice((1, 2, 1, -1, 2, 1, 3))
    assert exc.value.prefix == 5


def test_zero_letter_rejected():
    with pytest.raises(InvalidWordError) as exc:
        PermutationLattice((1, 0))
    assert exc.value.prefix == 2
    assert not is_lattice((1, 0))


def test_lattice_parse_round_trip():
    w = PermutationLattice.parse("(1,-1,1)")
    assert str(w) == "(1,-1,1)"
    assert w[2] == -1
    with pytest.raises(IndexRangeError):
        w[4]


def test_prefix_and_level_shape():
    w = PermutationLattice((1, 1, -1))
    assert prefix(w, 2) == PermutationLattice((1, 1))
    assert level_shape(w, 2) == Shape((2,))
    assert level_shape(w, 0) == Shape(())
    with pytest.raises(IndexRangeError):
        prefix(w, 4)


# --- Transpose ---


@given(st.sampled_from(SMALL_LATTICES))
def test_transpose_is_involution(w):
    assert transpose(transpose(w)) == w


@given(st.sampled_from(SMALL_LATTICES))
def test_transpose_conjugates_shape(w):
    assert transpose(w).shape == w.shape.conjugate()


def test_transpose_known_words():
    assert transpose(PermutationLattice((1, 1))) == PermutationLattice((1, 2))
    assert transpose(PermutationLattice((1, -1))) == PermutationLattice((1, -1))


# --- Ordering ---


@given(st.sampled_from(SMALL_LATTICES), st.sampled_from(SMALL_LATTICES))
def test_compare_is_antisymmetric(u, v):
    if u.order != v.order or u.shape != v.shape:
        with pytest.raises(ShapeError):
            compare_lattices(u, v)
        return
    assert compare_lattices(u, v) == -compare_lattices(v, u)
    assert (compare_lattices(u, v) == Ordering.EQUAL) == (u == v)


# --- Enumeration ---


def test_enumerate_order_three():
    words = [str(w) for w in enumerate_lattices(3, Shape((1,)))]
    assert words == ["(1,-1,1)", "(1,1,-1)", "(1,2,-2)"]


def test_enumerate_empty_shape_order_two():
    assert enumerate_lattices(2, Shape(())) == (PermutationLattice((1, -1)),)


def test_enumerate_parity_violation_is_empty():
    assert enumerate_lattices(3, Shape((2,))) == ()
    assert dimension(3, Shape((2,))) == 0


@pytest.mark.parametrize("f", range(0, 7))
def test_enumeration_matches_dimension_formula(f):
    total = 0
    for shape in upsilon(f):
        lattices = enumerate_lattices(f, shape)
        assert len(lattices) == dimension(f, shape)
        assert all(compare_lattices(a, b) == Ordering.LESS for a, b in zip(lattices, lattices[1:]))
        total += len(lattices) ** 2
    assert total == _double_factorial(2 * f - 1)


def test_dimension_known_values():
    assert dimension(3, Shape((1,))) == 3
    assert dimension(4, Shape(())) == 3
    assert dimension(4, Shape((2,))) == 6 * 1
