"""Exception hierarchy. Every error maps to a CLI exit code."""

from __future__ import annotations

from typing import Any

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2
EXIT_GUARD = 3
EXIT_AMBIGUOUS = 4


class BrauerError(Exception):
    exit_code: int = EXIT_VERIFICATION


class InvalidWordError(BrauerError, ValueError):
    """A word fails the lattice condition at some prefix."""

    exit_code = EXIT_USAGE

    def __init__(self, word: tuple[int, ...], prefix: int, reason: str = ""):
        self.word = word
        self.prefix = prefix
        detail = f": {reason}" if reason else ""
        super().__init__(f"{word} is not a permutation lattice (prefix {prefix}{detail})")


class ShapeError(BrauerError, ValueError):
    exit_code = EXIT_USAGE


class SignatureError(BrauerError, ValueError):
    exit_code = EXIT_USAGE


class IndexRangeError(BrauerError, IndexError):
    exit_code = EXIT_USAGE


class SemisimplicityError(BrauerError, ValueError):
    exit_code = EXIT_GUARD


class DegenerateDenominatorError(BrauerError, ZeroDivisionError):
    """A matrix entry would divide by zero for the given pair."""

    def __init__(self, u: Any, v: Any, i: int, quantity: str):
        self.u = u
        self.v = v
        self.i = i
        self.quantity = quantity
        super().__init__(f"{quantity} vanishes at i={i} for pair {u}, {v}")


class NonRealEntryError(BrauerError, ValueError):
    """A matrix entry needs the square root of a negative rational."""

    def __init__(self, u: Any, v: Any, i: int, radicand: Any):
        self.u = u
        self.v = v
        self.i = i
        self.radicand = radicand
        super().__init__(f"negative radicand {radicand} at i={i} for pair {u}, {v}")


class RelationGateError(BrauerError):
    """A constructed module does not satisfy the algebra relations."""


class AssemblyError(BrauerError):
    pass


class GramError(BrauerError):
    pass


class PhaseError(BrauerError):
    pass


class RankAmbiguityError(BrauerError):
    exit_code = EXIT_AMBIGUOUS
