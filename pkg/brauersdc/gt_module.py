"""Gelfand-Tzetlin modules [f, lambda] of the Brauer algebra B_f(x).

The basis is the canonically ordered list of permutation lattices of order f
and shape lambda. For every generator index i the basis splits into i-coupling
classes (lattices agreeing outside positions i, i+1). A class is either a
crossing class, where g_i acts by the orthogonal form and e_i vanishes, or an
i-bar class (w_i = -w_{i+1} for all members), where e_i is a rank-one
projector scaled by x built from P_lambda ratios.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np
import sympy

from .errors import (
    DegenerateDenominatorError,
    IndexRangeError,
    NonRealEntryError,
    RelationGateError,
    ShapeError,
)
from .interfaces import RepresentationProtocol
from .lattice import PermutationLattice, Shape, enumerate_lattices, is_lattice, level_shape
from .schemas import ActionConvention, GeneratorKind
from .young import X, RationalParam, diamond, jm_diamond, p_eval, p_expr

logger = logging.getLogger(__name__)

StepDiamond = Callable[[PermutationLattice, PermutationLattice, int, RationalParam], Fraction]

_STEP_DIAMONDS: dict[ActionConvention, StepDiamond] = {
    ActionConvention.JUCYS_MURPHY: jm_diamond,
    ActionConvention.LITERAL: diamond,
}


# --- Coupling ---

def _check_same_space(u: PermutationLattice, v: PermutationLattice, i: int) -> None:
    if u.order != v.order or u.shape != v.shape:
        raise ShapeError(f"{u} and {v} differ in order or shape")
    if not 1 <= i <= u.order - 1:
        raise IndexRangeError(f"generator index {i} outside 1..{u.order - 1}")


def i_coupled(u: PermutationLattice, v: PermutationLattice, i: int) -> bool:
    _check_same_space(u, v, i)
    return u.word[: i - 1] == v.word[: i - 1] and u.word[i + 1 :] == v.word[i + 1 :]


def is_ibar_self(w: PermutationLattice, i: int) -> bool:
    """w_i = -w_{i+1}: the path returns to the level-(i-1) shape after step i+1."""
    return w[i] == -w[i + 1]


def ibar_coupled(u: PermutationLattice, v: PermutationLattice, i: int) -> bool:
    return i_coupled(u, v, i) and is_ibar_self(u, i) and is_ibar_self(v, i)


def _class_key(w: PermutationLattice, i: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return w.word[: i - 1], w.word[i + 1 :]


@lru_cache(maxsize=None)
def coupling_classes(f: int, shape: Shape, i: int) -> tuple[tuple[int, ...], ...]:
    """Partition of basis indices into i-coupling classes, ordered by first member."""
    if not 1 <= i <= f - 1:
        raise IndexRangeError(f"generator index {i} outside 1..{f - 1}")
    groups: dict[tuple, list[int]] = {}
    for k, w in enumerate(enumerate_lattices(f, shape)):
        groups.setdefault(_class_key(w, i), []).append(k)
    return tuple(sorted((tuple(g) for g in groups.values()), key=lambda g: g[0]))


def _class_of(w: PermutationLattice, i: int) -> tuple[PermutationLattice, ...]:
    if not 1 <= i <= w.order - 1:
        raise IndexRangeError(f"generator index {i} outside 1..{w.order - 1}")
    basis = enumerate_lattices(w.order, w.shape)
    key = _class_key(w, i)
    return tuple(u for u in basis if _class_key(u, i) == key)


def theta_set(w: PermutationLattice, i: int) -> list[PermutationLattice]:
    """All lattices i-coupled with w (w included), canonical order."""
    return list(_class_of(w, i))


def theta_bar_set(w: PermutationLattice, i: int) -> list[PermutationLattice]:
    """All lattices i-bar-coupled with w; empty unless w itself is i-bar."""
    if not is_ibar_self(w, i):
        return []
    return [u for u in _class_of(w, i) if is_ibar_self(u, i)]


def g_word_action(w: PermutationLattice, i: int) -> PermutationLattice:
    """Swap w_i and w_{i+1}; a swap leaving the lattice set is a fixed point."""
    if not 1 <= i <= w.order - 1:
        raise IndexRangeError(f"generator index {i} outside 1..{w.order - 1}")
    word = list(w.word)
    word[i - 1], word[i] = word[i], word[i - 1]
    if tuple(word) == w.word or not is_lattice(word):
        return w
    return PermutationLattice(tuple(word))


# --- Matrix entries ---

def _sqrt(radicand: Fraction, u: PermutationLattice, v: PermutationLattice, i: int) -> float:
    if radicand < 0:
        raise NonRealEntryError(u, v, i, radicand)
    return math.sqrt(radicand.numerator) / math.sqrt(radicand.denominator)


def crossing_entry(
    u: PermutationLattice,
    v: PermutationLattice,
    i: int,
    x: RationalParam,
    convention: ActionConvention = ActionConvention.JUCYS_MURPHY,
) -> float:
    """<u|g_i|v> inside a crossing class: 1/d on the diagonal, sqrt(1 - 1/d^2) off it."""
    d = _STEP_DIAMONDS[convention](u, u, i, x)
    if d == 0:
        raise DegenerateDenominatorError(u, v, i, "axial distance d_i")
    if u == v:
        return float(1 / d)
    return _sqrt(1 - 1 / (d * d), u, v, i)


def _ibar_ratios(
    u: PermutationLattice, v: PermutationLattice, i: int, x: RationalParam
) -> tuple[Fraction, Fraction, Fraction]:
    p_mu = p_eval(level_shape(u, i - 1), x)
    if p_mu == 0:
        raise DegenerateDenominatorError(u, v, i, f"P_{level_shape(u, i - 1)}(x)")
    return p_mu, p_eval(level_shape(u, i), x), p_eval(level_shape(v, i), x)


def ibar_e_entry(u: PermutationLattice, v: PermutationLattice, i: int, x: RationalParam) -> float:
    """<u|e_i|v> = sqrt(P_u P_v) / P_mu with mu the common level-(i-1) shape."""
    p_mu, p_u, p_v = _ibar_ratios(u, v, i, x)
    return _sqrt(p_u * p_v, u, v, i) / float(p_mu)


def _sympy_rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _step_diamond_expr(u: PermutationLattice, i: int, convention: ActionConvention) -> sympy.Expr:
    """The step diamond of (u, u) as a linear function of X, read off at x = 0 and x = 1."""
    step = _STEP_DIAMONDS[convention]
    at0 = step(u, u, i, RationalParam(Fraction(0)))
    at1 = step(u, u, i, RationalParam(Fraction(1)))
    if at0 == 0 and at1 == 0:
        raise DegenerateDenominatorError(u, u, i, "diamond")
    return _sympy_rational(at0) + _sympy_rational(at1 - at0) * X


@lru_cache(maxsize=None)
def ibar_diagonal_function(u: PermutationLattice, i: int, convention: ActionConvention) -> sympy.Expr:
    """(1 - P_u/P_mu) / diamond(u, u) in lowest terms.

    Numerator and diamond vanish together at some semisimple integer x;
    cancelling first leaves only the genuine poles.
    """
    p_mu = p_expr(level_shape(u, i - 1))
    p_u = p_expr(level_shape(u, i))
    return sympy.cancel((p_mu - p_u) / (p_mu * _step_diamond_expr(u, i, convention)))


def ibar_diagonal(
    u: PermutationLattice,
    i: int,
    x: RationalParam,
    convention: ActionConvention = ActionConvention.JUCYS_MURPHY,
) -> Fraction:
    """Exact <u|g_i|u> on an i-bar class."""
    num, den = sympy.fraction(ibar_diagonal_function(u, i, convention))
    at = _sympy_rational(x.value)
    den_value = sympy.Rational(den.subs(X, at))
    if den_value == 0:
        raise DegenerateDenominatorError(u, u, i, "i-bar diagonal")
    value = sympy.Rational(num.subs(X, at)) / den_value
    return Fraction(int(value.p), int(value.q))


def ibar_g_entry(
    u: PermutationLattice,
    v: PermutationLattice,
    i: int,
    x: RationalParam,
    convention: ActionConvention = ActionConvention.JUCYS_MURPHY,
) -> float:
    if u == v:
        return float(ibar_diagonal(u, i, x, convention))
    p_mu, p_u, p_v = _ibar_ratios(u, v, i, x)
    d = _STEP_DIAMONDS[convention](u, v, i, x)
    if d == 0:
        raise DegenerateDenominatorError(u, v, i, "diamond")
    return -_sqrt(p_u * p_v, u, v, i) / float(p_mu * d)


# --- Module ---

@dataclass(frozen=True, eq=False)
class GTModule:
    f: int
    shape: Shape
    x: RationalParam
    basis: tuple[PermutationLattice, ...]
    g_mats: tuple[np.ndarray, ...]
    e_mats: tuple[np.ndarray, ...]
    convention: ActionConvention = ActionConvention.JUCYS_MURPHY

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def generator_indices(self) -> tuple[int, ...]:
        return tuple(range(1, self.f))

    @cached_property
    def index(self) -> dict[PermutationLattice, int]:
        return {w: k for k, w in enumerate(self.basis)}

    def generator(self, kind: GeneratorKind, i: int) -> np.ndarray:
        if not 1 <= i <= self.f - 1:
            raise IndexRangeError(f"generator index {i} outside 1..{self.f - 1}")
        mats = self.g_mats if kind == GeneratorKind.G else self.e_mats
        return mats[i - 1]


def build_module(
    f: int,
    shape: Shape,
    x: RationalParam,
    convention: ActionConvention = ActionConvention.JUCYS_MURPHY,
) -> GTModule:
    if not shape.in_upsilon(f):
        raise ShapeError(f"{shape} does not label an irrep of B_{f}")
    t0 = time.perf_counter()
    basis = enumerate_lattices(f, shape)
    n = len(basis)
    g_mats: list[np.ndarray] = []
    e_mats: list[np.ndarray] = []
    for i in range(1, f):
        g = np.zeros((n, n))
        e = np.zeros((n, n))
        for members in coupling_classes(f, shape, i):
            lattices = [basis[k] for k in members]
            ibar = is_ibar_self(lattices[0], i)
            for a, u in zip(members, lattices):
                for b, v in zip(members, lattices):
                    if ibar:
                        g[a, b] = ibar_g_entry(u, v, i, x, convention)
                        e[a, b] = ibar_e_entry(u, v, i, x)
                    else:
                        g[a, b] = crossing_entry(u, v, i, x, convention)
        g_mats.append(g)
        e_mats.append(e)
    elapsed = (time.perf_counter() - t0) * 1000
    logger.debug(f"Module [{f},{shape}] at x={x}: dim={n}, built in {elapsed:.1f}ms")
    return GTModule(
        f=f, shape=shape, x=x, basis=basis,
        g_mats=tuple(g_mats), e_mats=tuple(e_mats), convention=convention,
    )


# --- Relations ---

def _max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a), initial=0.0))


@dataclass(frozen=True)
class RelationReport:
    f: int
    shape: Shape
    x: RationalParam
    tol: float
    relations: dict[str, float] = field(default_factory=dict)
    opportunistic: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.relations.values())

    @property
    def failures(self) -> list[str]:
        return [name for name, r in self.relations.items() if r > self.tol]


def check_relations(m: GTModule, tol: float = 1e-9) -> RelationReport:
    """Max-norm residuals of the defining relations, plus hermiticity.

    Extra Brauer relations not in the defining list are reported under
    ``opportunistic`` and never gate ``passed``.
    """
    x = float(m.x)
    g, e = m.g_mats, m.e_mats
    n = len(g)
    eye = np.eye(m.dim)
    rel = {name: 0.0 for name in ("braid", "commutation", "e_g", "e_g_e", "e_square", "g_square", "hermiticity")}
    opp = {name: 0.0 for name in ("e_e_e", "g_e_e", "distant_e", "e_spectrum", "e_trace")}

    for k in range(n):
        gi, ei = g[k], e[k]
        rel["e_g"] = max(rel["e_g"], _max_abs(ei @ gi - ei))
        rel["e_square"] = max(rel["e_square"], _max_abs(ei @ ei - x * ei))
        rel["g_square"] = max(rel["g_square"], _max_abs(gi @ gi - eye))
        rel["hermiticity"] = max(rel["hermiticity"], _max_abs(gi - gi.T), _max_abs(ei - ei.T))
        if k >= 1:
            rel["e_g_e"] = max(rel["e_g_e"], _max_abs(ei @ g[k - 1] @ ei - ei))
            opp["e_e_e"] = max(opp["e_e_e"], _max_abs(ei @ e[k - 1] @ ei - ei))
        if k + 1 < n:
            rel["braid"] = max(rel["braid"], _max_abs(gi @ g[k + 1] @ gi - g[k + 1] @ gi @ g[k + 1]))
            opp["e_e_e"] = max(opp["e_e_e"], _max_abs(ei @ e[k + 1] @ ei - ei))
            opp["g_e_e"] = max(opp["g_e_e"], _max_abs(gi @ e[k + 1] @ ei - g[k + 1] @ ei))
        for j in range(k + 2, n):
            rel["commutation"] = max(rel["commutation"], _max_abs(gi @ g[j] - g[j] @ gi))
            opp["distant_e"] = max(
                opp["distant_e"], _max_abs(ei @ e[j] - e[j] @ ei), _max_abs(gi @ e[j] - e[j] @ gi)
            )
        if m.dim:
            spectrum = np.linalg.eigvalsh((ei + ei.T) / 2)
            distance = np.minimum(np.abs(spectrum), np.abs(spectrum - x))
            opp["e_spectrum"] = max(opp["e_spectrum"], float(distance.max()))
            rank = int(np.sum(np.abs(spectrum - x) < np.abs(spectrum)))
            opp["e_trace"] = max(opp["e_trace"], abs(float(np.trace(ei)) - x * rank))

    return RelationReport(f=m.f, shape=m.shape, x=m.x, tol=tol, relations=rel, opportunistic=opp)


@dataclass(frozen=True)
class CalibrationAnchor:
    """Diagonal g_1 entry on the one-dimensional module [2, empty]."""

    x: RationalParam
    literal: Fraction
    calibrated: Fraction
    e: Fraction

    @property
    def forced(self) -> Fraction:
        # e g = e and e^2 = x e on a 1-dim module with e = x force g = 1
        return Fraction(1)


def calibration_anchor(x: RationalParam) -> CalibrationAnchor:
    w = PermutationLattice((1, -1))
    return CalibrationAnchor(
        x=x,
        literal=ibar_diagonal(w, 1, x, ActionConvention.LITERAL),
        calibrated=ibar_diagonal(w, 1, x, ActionConvention.JUCYS_MURPHY),
        e=p_eval(level_shape(w, 1), x) / p_eval(level_shape(w, 0), x),
    )


@lru_cache(maxsize=None)
def gated_module(f: int, shape: Shape, x: RationalParam, tol: float = 1e-9) -> GTModule:
    """build_module behind the relation gate; raises RelationGateError on failure."""
    module = build_module(f, shape, x)
    report = check_relations(module, tol)
    if not report.passed:
        worst = {name: report.relations[name] for name in report.failures}
        raise RelationGateError(f"[{f},{shape}] at x={x} fails relations: {worst}")
    return module


# --- Split representation ---

@dataclass(frozen=True, eq=False)
class SplitRepresentation:
    """[f1, lambda1] (x) [f2, lambda2] as a module of B_f1 x B_f2 inside B_f.

    Generator l < f1 acts on the first factor, l > f1 acts as l - f1 on the second.
    """

    first: RepresentationProtocol
    second: RepresentationProtocol

    @property
    def f(self) -> int:
        return self.first.f + self.second.f

    @property
    def dim(self) -> int:
        return self.first.dim * self.second.dim

    @property
    def generator_indices(self) -> tuple[int, ...]:
        f1 = self.first.f
        return tuple(range(1, f1)) + tuple(range(f1 + 1, self.f))

    def generator(self, kind: GeneratorKind, i: int) -> np.ndarray:
        f1 = self.first.f
        if i < f1:
            return np.kron(self.first.generator(kind, i), np.eye(self.second.dim))
        if i > f1:
            return np.kron(np.eye(self.first.dim), self.second.generator(kind, i - f1))
        raise IndexRangeError(f"generator index {i} crosses the split at f1={f1}")
