"""Words, permutation lattices and Young shapes.

A permutation lattice of order f is a word of nonzero integers whose every
prefix has weakly decreasing, nonnegative counting values
#^(k) = #(k) - #(-k). It encodes a path in the Brauer Bratteli diagram:
a positive letter r adds a box to row r, a negative letter -r removes one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import IndexRangeError, InvalidWordError, ShapeError


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


@dataclass(frozen=True)
class Shape:
    """Young diagram as a weakly decreasing tuple of positive row lengths."""

    rows: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        rows = tuple(int(r) for r in self.rows)
        if any(r <= 0 for r in rows):
            raise ShapeError(f"shape rows must be positive: {list(rows)}")
        if any(a < b for a, b in zip(rows, rows[1:])):
            raise ShapeError(f"shape rows must be weakly decreasing: {list(rows)}")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def parse(cls, text: str) -> Shape:
        """Parse bracket syntax: "[2,1]", "[]"."""
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ShapeError(f"shape must be written as [r1,r2,...], got {text!r}")
        inner = body[1:-1].strip()
        if not inner:
            return cls(())
        try:
            return cls(tuple(int(part) for part in inner.split(",")))
        except ValueError as e:
            raise ShapeError(f"cannot parse shape {text!r}") from e

    def __str__(self) -> str:
        return "[" + ",".join(str(r) for r in self.rows) + "]"

    @property
    def boxes(self) -> int:
        return sum(self.rows)

    @property
    def length(self) -> int:
        return len(self.rows)

    def row(self, i: int) -> int:
        """Length of row i (1-based), zero past the last row."""
        return self.rows[i - 1] if 1 <= i <= len(self.rows) else 0

    def column(self, j: int) -> int:
        """Length of column j (1-based)."""
        return sum(1 for r in self.rows if r >= j)

    def conjugate(self) -> Shape:
        if not self.rows:
            return Shape(())
        return Shape(tuple(self.column(j) for j in range(1, self.rows[0] + 1)))

    def contains(self, i: int, j: int) -> bool:
        return 1 <= i <= len(self.rows) and 1 <= j <= self.rows[i - 1]

    def cells(self) -> Iterator[tuple[int, int]]:
        for i, r in enumerate(self.rows, start=1):
            for j in range(1, r + 1):
                yield i, j

    def hook(self, i: int, j: int) -> int:
        return self.row(i) + self.column(j) - i - j + 1

    def addable_rows(self) -> list[int]:
        return [r for r in range(1, len(self.rows) + 2) if r == 1 or self.row(r) < self.row(r - 1)]

    def removable_rows(self) -> list[int]:
        return [r for r in range(1, len(self.rows) + 1) if self.row(r) > self.row(r + 1)]

    def add_box(self, r: int) -> Shape:
        rows = list(self.rows) + [0]
        rows[r - 1] += 1
        return Shape(tuple(v for v in rows if v > 0))

    def remove_box(self, r: int) -> Shape:
        rows = list(self.rows)
        rows[r - 1] -= 1
        return Shape(tuple(v for v in rows if v > 0))

    def in_upsilon(self, f: int) -> bool:
        """Membership of the label set of [f, lambda] irreps."""
        return f >= 0 and self.boxes <= f and (f - self.boxes) % 2 == 0

    def includes(self, other: Shape) -> bool:
        return all(self.row(i) >= other.row(i) for i in range(1, other.length + 1))


def _counting_rows(word: Sequence[int]) -> dict[int, int]:
    counts: dict[int, int] = {}
    for k in word:
        r = abs(k)
        counts[r] = counts.get(r, 0) + (1 if k > 0 else -1)
    return counts


def _chain_holds(counts: dict[int, int]) -> bool:
    top = max(counts, default=0)
    seq = [counts.get(r, 0) for r in range(1, top + 2)]
    return all(a >= b for a, b in zip(seq, seq[1:])) and all(v >= 0 for v in seq)


@dataclass(frozen=True)
class PermutationLattice:
    """Validated word; construction raises InvalidWordError on the first bad prefix."""

    word: tuple[int, ...]
    shape: Shape = field(init=False, compare=False)

    def __post_init__(self) -> None:
        word = tuple(int(k) for k in self.word)
        counts: dict[int, int] = {}
        for pos, k in enumerate(word, start=1):
            if k == 0:
                raise InvalidWordError(word, pos, "zero element")
            r = abs(k)
            counts[r] = counts.get(r, 0) + (1 if k > 0 else -1)
            if not _chain_holds(counts):
                raise InvalidWordError(word, pos)
        rows = []
        for r in range(1, max(counts, default=0) + 1):
            if counts.get(r, 0) == 0:
                break
            rows.append(counts[r])
        object.__setattr__(self, "word", word)
        object.__setattr__(self, "shape", Shape(tuple(rows)))

    @classmethod
    def parse(cls, text: str) -> PermutationLattice:
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise ValueError(f"lattice must be written as (w1,w2,...), got {text!r}")
        inner = body[1:-1].strip()
        return cls(tuple(int(p) for p in inner.split(",")) if inner else ())

    def __str__(self) -> str:
        return "(" + ",".join(str(k) for k in self.word) + ")"

    def __len__(self) -> int:
        return len(self.word)

    def __getitem__(self, i: int) -> int:
        """1-based letter access."""
        if not 1 <= i <= len(self.word):
            raise IndexRangeError(f"position {i} outside 1..{len(self.word)}")
        return self.word[i - 1]

    @property
    def order(self) -> int:
        return len(self.word)


def counting(word: Sequence[int], k: int) -> int:
    """#^_w(k) = #_w(k) - #_w(-k) for any nonzero k."""
    if k == 0:
        raise ValueError("counting is defined on nonzero integers")
    value = _counting_rows(word).get(abs(k), 0)
    return value if k > 0 else -value


def validate_word(word: Sequence[int]) -> PermutationLattice:
    return PermutationLattice(tuple(word))


def is_lattice(word: Sequence[int]) -> bool:
    try:
        PermutationLattice(tuple(word))
    except InvalidWordError:
        return False
    return True


def prefix(w: PermutationLattice, i: int) -> PermutationLattice:
    if not 0 <= i <= w.order:
        raise IndexRangeError(f"prefix length {i} outside 0..{w.order}")
    return _prefix(w.word[:i])


@lru_cache(maxsize=None)
def _prefix(word: tuple[int, ...]) -> PermutationLattice:
    return PermutationLattice(word)


def level_shape(w: PermutationLattice, i: int) -> Shape:
    """Shape of the i-th level of the Bratteli path encoded by w."""
    return prefix(w, i).shape


@lru_cache(maxsize=None)
def transpose(w: PermutationLattice) -> PermutationLattice:
    # w^t_i = #^_{w^(i-1)}(w_i) + theta(w_i)
    counts: dict[int, int] = {}
    out = []
    for k in w.word:
        r = abs(k)
        current = counts.get(r, 0)
        out.append((current if k > 0 else -current) + (1 if k > 0 else 0))
        counts[r] = current + (1 if k > 0 else -1)
    return PermutationLattice(tuple(out))


def compare_lattices(u: PermutationLattice, v: PermutationLattice) -> Ordering:
    """u < v iff the first nonzero entry of u - v is negative."""
    if u.order != v.order or u.shape != v.shape:
        raise ShapeError(f"cannot compare {u} ({u.shape}) with {v} ({v.shape})")
    for a, b in zip(u.word, v.word):
        if a != b:
            return Ordering.LESS if a < b else Ordering.GREATER
    return Ordering.EQUAL


def _min_steps(current: Shape, target: Shape) -> int:
    common = sum(min(current.row(i), target.row(i)) for i in range(1, max(current.length, target.length) + 1))
    return current.boxes + target.boxes - 2 * common


@lru_cache(maxsize=None)
def enumerate_lattices(f: int, shape: Shape) -> tuple[PermutationLattice, ...]:
    """All lattices of order f and the given shape, ascending under compare_lattices.

    Depth-first extension down the Bratteli diagram; a branch is cut as soon
    as the target shape is out of reach in the remaining steps.
    """
    if not shape.in_upsilon(f):
        return ()
    found: list[tuple[int, ...]] = []

    def extend(word: list[int], current: Shape) -> None:
        remaining = f - len(word)
        if remaining == 0:
            if current == shape:
                found.append(tuple(word))
            return
        moves = [(r, current.add_box(r)) for r in current.addable_rows()]
        moves += [(-r, current.remove_box(r)) for r in current.removable_rows()]
        for letter, nxt in moves:
            if _min_steps(nxt, shape) <= remaining - 1:
                word.append(letter)
                extend(word, nxt)
                word.pop()

    extend([], Shape(()))
    return tuple(PermutationLattice(word) for word in sorted(found))


def all_lattices(f: int) -> Iterator[PermutationLattice]:
    for shape in upsilon(f):
        yield from enumerate_lattices(f, shape)


def partitions(n: int, max_part: int | None = None) -> Iterator[Shape]:
    """Partitions of n in reverse lexicographic order."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield Shape(())
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield Shape((first,) + rest.rows)


@lru_cache(maxsize=None)
def upsilon(f: int) -> tuple[Shape, ...]:
    """Labels of the irreps of B_f: shapes with f, f-2, ... boxes."""
    return tuple(s for k in range(f, -1, -2) for s in partitions(k))


def symmetric_dimension(shape: Shape) -> int:
    """dim of the S_n irrep [shape] by the hook-length formula."""
    hooks = math.prod(shape.hook(i, j) for i, j in shape.cells())
    return math.factorial(shape.boxes) // hooks


def dimension(f: int, shape: Shape) -> int:
    """dim [f, lambda] = f! / ((f-2k)! (2k)!!) * dim(S_{f-2k}; lambda)."""
    if not shape.in_upsilon(f):
        return 0
    k = (f - shape.boxes) // 2
    double_factorial = 2**k * math.factorial(k)
    return math.factorial(f) // (math.factorial(f - 2 * k) * double_factorial) * symmetric_dimension(shape)
