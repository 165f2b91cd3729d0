"""Young-diagram combinatorics over exact rationals at a fixed parameter x.

Nothing here touches floating point: hooks, d(i, j), the polynomial P_lambda,
nabla, diamond and axial distances are all computed in ``Fraction``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy

from .errors import IndexRangeError, SemisimplicityError, ShapeError
from .lattice import PermutationLattice, Shape, transpose

X = sympy.Symbol("x")


def format_rational(value: Fraction) -> str:
    """"p/q" in lowest terms with q > 0, or "p" for integers."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class RationalParam:
    value: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", Fraction(self.value))

    @classmethod
    def parse(cls, text: str | int | Fraction) -> RationalParam:
        if isinstance(text, (int, Fraction)):
            return cls(Fraction(text))
        body = str(text).strip()
        try:
            return cls(Fraction(body))
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"x must be a rational 'p/q' or integer, got {text!r}") from e

    def __str__(self) -> str:
        return format_rational(self.value)

    def __float__(self) -> float:
        return float(self.value)

    @property
    def is_integer(self) -> bool:
        return self.value.denominator == 1

    def is_semisimple(self, f: int) -> bool:
        return not self.is_integer or self.value >= f - 1

    def guard(self, f: int, allow_nonsemisimple: bool = False) -> RationalParam:
        """Refuse integer x < f - 1 unless explicitly allowed."""
        if not self.is_semisimple(f) and not allow_nonsemisimple:
            raise SemisimplicityError(
                f"B_{f}({self}) is not semisimple: integer x must satisfy x >= {f - 1}"
            )
        return self


@dataclass(frozen=True)
class RationalPolynomial:
    """Exact polynomial, coefficients in ascending degree; the zero polynomial is ()."""

    coefficients: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        coeffs = [Fraction(c) for c in self.coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def from_sympy(cls, poly: sympy.Poly) -> RationalPolynomial:
        descending = poly.all_coeffs()
        return cls(tuple(Fraction(int(c.p), int(c.q)) for c in reversed(descending)))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x: Fraction | RationalParam) -> Fraction:
        value = x.value if isinstance(x, RationalParam) else Fraction(x)
        result = Fraction(0)
        for c in reversed(self.coefficients):
            result = result * value + c
        return result

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        terms = []
        for k, c in enumerate(self.coefficients):
            if c == 0:
                continue
            coeff = format_rational(c)
            terms.append(coeff if k == 0 else f"{coeff}*x^{k}" if k > 1 else f"{coeff}*x")
        return " + ".join(terms)


def _require_box(shape: Shape, i: int, j: int) -> None:
    if not shape.contains(i, j):
        raise ShapeError(f"box ({i},{j}) is not in {shape}")


def hook(shape: Shape, i: int, j: int) -> int:
    _require_box(shape, i, j)
    return shape.hook(i, j)


def dfun(shape: Shape, i: int, j: int) -> int:
    _require_box(shape, i, j)
    if i <= j:
        return shape.row(i) + shape.row(j) - i - j + 1
    return -shape.column(i) - shape.column(j) + i + j - 1


@lru_cache(maxsize=None)
def p_expr(shape: Shape) -> sympy.Expr:
    """P_lambda as a sympy product in the symbol X, left unexpanded."""
    expr = sympy.Integer(1)
    for i, j in shape.cells():
        expr *= (X - 1 + dfun(shape, i, j)) / sympy.Integer(hook(shape, i, j))
    return expr


@lru_cache(maxsize=None)
def p_poly(shape: Shape) -> RationalPolynomial:
    """P_lambda(x) = prod over boxes of (x - 1 + d(i,j)) / h(i,j)."""
    return RationalPolynomial.from_sympy(sympy.Poly(sympy.expand(p_expr(shape)), X, domain=sympy.QQ))


@lru_cache(maxsize=None)
def p_eval(shape: Shape, x: RationalParam) -> Fraction:
    num = math.prod((x.value - 1 + dfun(shape, i, j) for i, j in shape.cells()), start=Fraction(1))
    den = math.prod(hook(shape, i, j) for i, j in shape.cells())
    return num / den


def theta(k: int) -> int:
    return 1 if k > 0 else 0


def _check_position(w: PermutationLattice, i: int) -> None:
    if not 1 <= i <= w.order:
        raise IndexRangeError(f"position {i} outside 1..{w.order} for {w}")


def nabla(w: PermutationLattice, i: int, x: RationalParam) -> Fraction:
    _check_position(w, i)
    wi = w[i]
    return Fraction(transpose(w)[i] - wi) - x.value + x.value * theta(wi)


def _check_pair(u: PermutationLattice, v: PermutationLattice, i: int) -> None:
    if u.order != v.order or u.shape != v.shape:
        raise ShapeError(f"{u} and {v} differ in order or shape")
    if not 1 <= i <= u.order - 1:
        raise IndexRangeError(f"generator index {i} outside 1..{u.order - 1}")


def diamond(u: PermutationLattice, v: PermutationLattice, i: int, x: RationalParam) -> Fraction:
    _check_pair(u, v, i)
    return nabla(u, i + 1, x) - nabla(v, i, x)


def axial_distance(w: PermutationLattice, i: int, j: int, x: RationalParam) -> Fraction:
    _check_position(w, i)
    _check_position(w, j)
    if i == j:
        return Fraction(0)
    lo, hi = min(i, j), max(i, j)
    total = sum((diamond(w, w, h, x) for h in range(lo, hi)), start=Fraction(0))
    return total if i < j else -total


def jm_eigenvalue(w: PermutationLattice, i: int, x: RationalParam) -> Fraction:
    """Eigenvalue of the i-th Jucys-Murphy element on |w>.

    Content c of the box when step i adds it, 1 - x - c when step i removes it.
    """
    _check_position(w, i)
    return nabla(w, i, x) + (1 - theta(w[i]))


def jm_diamond(u: PermutationLattice, v: PermutationLattice, i: int, x: RationalParam) -> Fraction:
    _check_pair(u, v, i)
    return jm_eigenvalue(u, i + 1, x) - jm_eigenvalue(v, i, x)


def content_profile(w: PermutationLattice) -> tuple[int, ...]:
    """Signed content per step: +c on additions, -c on removals (x-free part of nabla)."""
    t = transpose(w)
    return tuple(t[k] - w[k] for k in range(1, w.order + 1))
