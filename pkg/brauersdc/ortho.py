"""Gram/Sylvester orthonormalization and the Young-Yamanouchi phase."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .diagnostics import ResidualTracker, VerificationReport
from .errors import GramError, PhaseError
from .grid import GridNode, Signature, SubductionGrid
from .interfaces import RepresentationProtocol
from .schemas import GeneratorKind, Gauge, SdcTableDump
from .solver import SolutionBasis, SubductionSystem
from .young import RationalParam

logger = logging.getLogger(__name__)


def _leading_sign(v: np.ndarray, rel: float) -> float:
    scale = np.abs(v).max(initial=0.0)
    lead = np.flatnonzero(np.abs(v) > rel * scale)
    if scale == 0.0 or not lead.size:
        return 0.0
    return 1.0 if v[lead[0]] > 0 else -1.0


def gauge_matrix(gauge: Gauge, mu: int) -> np.ndarray:
    if gauge == Gauge.REVERSE:
        return np.eye(mu)[::-1]
    return np.eye(mu)


@dataclass(frozen=True, eq=False)
class GramResult:
    tau: np.ndarray
    sylvester: np.ndarray
    o_tau: np.ndarray
    eigenvalues: np.ndarray
    chosen_o: np.ndarray

    @property
    def residual(self) -> float:
        """max |sigma^T tau sigma - I|."""
        s = self.sylvester
        return float(np.abs(s.T @ self.tau @ s - np.eye(len(s))).max(initial=0.0))


def gram(basis: SolutionBasis, dims: tuple[int, int], gauge: Gauge = Gauge.IDENTITY) -> GramResult:
    """tau = chi^T chi / (d1 d2) and sigma = O_tau D_tau^(-1/2) O.

    Eigenvalues of tau are taken in descending order, each eigenvector with
    its first significant component positive, so O_tau is reproducible.
    """
    mu = basis.multiplicity
    if mu < 1:
        raise GramError("no solution vectors to orthonormalize")
    d1, d2 = dims
    chi = basis.vectors
    tau = chi.T @ chi / (d1 * d2)
    tau = (tau + tau.T) / 2
    values, vectors = np.linalg.eigh(tau)
    order = np.argsort(values, kind="stable")[::-1]
    values, vectors = values[order], vectors[:, order]
    if values[-1] <= 1e-12 * max(values[0], 1.0):
        raise GramError(f"Gram matrix is numerically singular (eigenvalues {values.tolist()})")
    for k in range(mu):
        if _leading_sign(vectors[:, k], 1e-9) < 0:
            vectors[:, k] = -vectors[:, k]
    chosen = gauge_matrix(gauge, mu)
    sylvester = vectors @ np.diag(values ** -0.5) @ chosen
    return GramResult(tau=tau, sylvester=sylvester, o_tau=vectors, eigenvalues=values, chosen_o=chosen)


def orthonormalize(basis: SolutionBasis, result: GramResult) -> np.ndarray:
    """chi~ = chi sigma; columns are the eta-indexed coefficient vectors."""
    return basis.vectors @ result.sylvester


@dataclass(frozen=True, eq=False)
class SdcTable:
    signature: Signature
    x: RationalParam
    multiplicity: int
    nodes: tuple[GridNode, ...]
    coefficients: np.ndarray  # (nodes, multiplicity)
    dims: tuple[int, int, int]
    gauge: Gauge = Gauge.IDENTITY
    diagnostics: dict[str, float] = field(default_factory=dict)

    def value(self, node: int, eta: int) -> float:
        return float(self.coefficients[node, eta])

    def block(self, eta: int) -> np.ndarray:
        """X_eta as a d x (d1 d2) matrix, rows w, columns iw1 * d2 + iw2."""
        d, d1, d2 = self.dims
        return self.coefficients[:, eta].reshape(d, d1 * d2)

    def to_model(self) -> SdcTableDump:
        phases, continuous = freedom_count(self.multiplicity)
        return SdcTableDump(
            signature=self.signature.to_model(),
            x=str(self.x),
            multiplicity=self.multiplicity,
            gauge=self.gauge,
            coefficients={
                str(node): [float(f"{v:.17g}") for v in self.coefficients[k]]
                for k, node in enumerate(self.nodes)
            },
            freedom={"phases": phases, "continuous": continuous},
        )


def fix_phases(
    chi_tilde: np.ndarray,
    grid: SubductionGrid,
    x: RationalParam,
    phase_tol: float = 1e-7,
    gauge: Gauge = Gauge.IDENTITY,
) -> SdcTable:
    """Make the first non-negligible entry of every column positive, in node order."""
    out = chi_tilde.copy()
    for eta in range(out.shape[1]):
        sign = _leading_sign(out[:, eta], phase_tol)
        if sign == 0.0:
            raise PhaseError(f"column {eta} of {grid.signature} vanishes")
        out[:, eta] *= sign
    table = SdcTable(
        signature=grid.signature,
        x=x,
        multiplicity=out.shape[1],
        nodes=grid.nodes,
        coefficients=out,
        dims=grid.signature.dims,
        gauge=gauge,
    )
    table.diagnostics["unitarity_columns"] = unitarity_columns(table)
    return table


def freedom_count(mu: int) -> tuple[int, int]:
    """(discrete phase choices, continuous parameters) left after orthonormalization."""
    if mu < 1:
        raise ValueError(f"multiplicity must be at least 1, got {mu}")
    return 2 ** (mu - 1) + 1, mu * (mu - 1) // 2


def unitarity_columns(table: SdcTable) -> float:
    """max |X_eta^T X_eta' - delta I| over all multiplicity pairs."""
    _, d1, d2 = table.dims
    eye = np.eye(d1 * d2)
    worst = 0.0
    for a in range(table.multiplicity):
        for b in range(table.multiplicity):
            product = table.block(a).T @ table.block(b)
            target = eye if a == b else 0.0
            worst = max(worst, float(np.abs(product - target).max(initial=0.0)))
    return worst


def unitarity_sweep(tables: Iterable[SdcTable], tol: float = 1e-8) -> VerificationReport:
    """Completeness of a full sweep: the stacked transformation T satisfies T T^T = I."""
    tables = list(tables)
    tracker = ResidualTracker(tol)
    if not tables:
        return tracker.report("unitarity_sweep")
    d = tables[0].dims[0]
    blocks = [t.block(eta) for t in tables for eta in range(t.multiplicity)]
    stacked = np.hstack(blocks) if blocks else np.zeros((d, 0))
    tracker.record("square", float(abs(stacked.shape[1] - d)), 0.0)
    tracker.record("rows", float(np.abs(stacked @ stacked.T - np.eye(d)).max(initial=0.0)))
    if stacked.shape[1] == d:
        tracker.record("columns", float(np.abs(stacked.T @ stacked - np.eye(d)).max(initial=0.0)))
    return tracker.report("unitarity_sweep")


def block_diagonalization(table: SdcTable, sys: SubductionSystem, tol: float = 1e-8) -> VerificationReport:
    """X_eta^T rho(a) X_eta' must equal delta * rho_split(a) for every subalgebra generator a."""
    tracker = ResidualTracker(tol)
    module: RepresentationProtocol = sys.module
    split: RepresentationProtocol = sys.split
    for i in sys.signature.legal_indices:
        for kind in GeneratorKind:
            rho = module.generator(kind, i)
            rho_s = split.generator(kind, i)
            for a in range(table.multiplicity):
                for b in range(table.multiplicity):
                    product = table.block(a).T @ rho @ table.block(b)
                    target = rho_s if a == b else np.zeros_like(rho_s)
                    tracker.record(f"{kind.value}{i}", float(np.abs(product - target).max(initial=0.0)))
    return tracker.report("block_diagonalization")
