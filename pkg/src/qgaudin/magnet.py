"""Gaudin magnet Hamiltonians, sum rules and the exact-diagonalization oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .couplings import CouplingFamily, Family
from .errors import (
    DimensionError,
    DomainError,
    PoleError,
    SimultaneousDiagonalizationError,
)
from .spin import MINUS, PLUS, ZERO, SpinSystem, dot_product, embed, is_hermitian, total_sz

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class MagnetSet:
    """The N commuting Hamiltonians ``h_1 ... h_N`` of one family on one system."""

    system: SpinSystem
    family: CouplingFamily
    hamiltonians: tuple[np.ndarray, ...]

    def __len__(self):
        return len(self.hamiltonians)

    def __getitem__(self, i):
        return self.hamiltonians[i]


def build_magnets(system: SpinSystem, family: CouplingFamily) -> MagnetSet:
    """Build ``h_i = sum_{j != i} [w^0 t_i^0 t_j^0 + w^1 (t_i^+ t_j^- + t_i^- t_j^+)/2]``."""
    n = system.n_sites
    if n < 2:
        raise DomainError("Gaudin magnets need at least two sites")
    gens = [{k: embed(system, i, k) for k in (ZERO, PLUS, MINUS)} for i in range(n)]
    zz = {}
    flip = {}
    for i in range(n):
        for j in range(i + 1, n):
            zz[i, j] = gens[i][ZERO] @ gens[j][ZERO]
            flip[i, j] = 0.5 * (gens[i][PLUS] @ gens[j][MINUS] + gens[i][MINUS] @ gens[j][PLUS])
    hams = []
    for i in range(n):
        h = np.zeros((system.dim, system.dim), dtype=complex)
        for j in range(n):
            if j == i:
                continue
            du = system.u[i] - system.u[j]
            try:
                w0 = family.w(0, du)
                w1 = family.w(1, du)
            except PoleError as exc:
                raise PoleError(f"coupling pole for site pair ({i}, {j}), du={du}: {exc}") from exc
            key = (min(i, j), max(i, j))
            h += w0 * zz[key] + w1 * flip[key]
        h.setflags(write=False)
        hams.append(h)
    return MagnetSet(system, family, tuple(hams))


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius norm of ``AB - BA``."""
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"commutator of shapes {a.shape} and {b.shape}")
    return float(np.linalg.norm(a @ b - b @ a))


def pair_interaction_sum(system: SpinSystem) -> np.ndarray:
    """``sum_{i != j} t_i · t_j`` (each unordered pair counted twice)."""
    out = np.zeros((system.dim, system.dim), dtype=complex)
    for i in range(system.n_sites):
        for j in range(i + 1, system.n_sites):
            out += 2.0 * dot_product(system, i, j)
    return out


def sum_rule_rhs(magnets: MagnetSet) -> np.ndarray:
    """Expected ``sum_i h_i``: zero for odd families, ``-q sum_{i!=j} t_i·t_j`` for q-deformed."""
    if magnets.family.tag is Family.Q_DEFORMED:
        return -magnets.family.param * pair_interaction_sum(magnets.system)
    d = magnets.system.dim
    return np.zeros((d, d), dtype=complex)


def sum_rule_check(magnets: MagnetSet, rhs: Optional[np.ndarray] = None) -> float:
    """Frobenius norm of ``sum_i h_i - rhs``; ``rhs`` defaults to the family's sum rule."""
    if rhs is None:
        rhs = sum_rule_rhs(magnets)
    return float(np.linalg.norm(sum(magnets.hamiltonians) - rhs))


def exact_spectrum(a: np.ndarray, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and unitary eigenvectors of a Hermitian matrix."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not is_hermitian(a, tol):
        raise DomainError("exact_spectrum needs a Hermitian operator")
    herm = 0.5 * (a + a.conj().T)
    return np.linalg.eigh(herm)


@dataclass(frozen=True)
class JointSpectrum:
    """Common eigenbasis of a commuting Hermitian family.

    ``eigenvalues[k, i]`` is the eigenvalue of operator ``i`` on the joint
    eigenvector ``vectors[:, k]``. When total ``S^z`` was included it is the
    last column and ``labels`` ends with ``"T"``.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    labels: tuple[str, ...]
    max_residual: float

    @property
    def n_ops(self) -> int:
        return self.eigenvalues.shape[1]

    def rows_matching(self, values: Sequence[float], tol: float) -> np.ndarray:
        """Indices of joint eigenvectors whose first ``len(values)`` columns match."""
        values = np.asarray(values, dtype=float)
        diff = np.abs(self.eigenvalues[:, : len(values)] - values[None, :])
        return np.nonzero(np.all(diff <= tol, axis=1))[0]


def _cluster(values: np.ndarray, tol: float) -> list[np.ndarray]:
    groups, start = [], 0
    for k in range(1, len(values) + 1):
        if k == len(values) or values[k] - values[k - 1] > tol:
            groups.append(np.arange(start, k))
            start = k
    return groups


def _joint_basis(ops, rng, cluster_tol):
    coeffs = rng.uniform(0.5, 1.5, size=len(ops)) * rng.choice([-1.0, 1.0], size=len(ops))
    combo = sum(c * op for c, op in zip(coeffs, ops))
    evals, vecs = np.linalg.eigh(0.5 * (combo + combo.conj().T))
    # split leftover (near-)degenerate clusters operator by operator
    for op in ops:
        for grp in _cluster(evals, cluster_tol):
            if len(grp) < 2:
                continue
            sub = vecs[:, grp]
            block = sub.conj().T @ op @ sub
            _, rot = np.linalg.eigh(0.5 * (block + block.conj().T))
            vecs[:, grp] = sub @ rot
    return vecs


def simultaneous_spectrum(
    magnets: MagnetSet,
    include_total_sz: bool = False,
    seed: int = 12345,
    residual_tol: float = 1e-8,
    commute_tol: float = 1e-9,
) -> JointSpectrum:
    """Diagonalize all ``h_i`` at once via a random real linear combination.

    One retry with fresh coefficients is made if any per-operator residual
    ``||h_i v - E_i v||`` exceeds ``residual_tol``.
    """
    ops = list(magnets.hamiltonians)
    labels = [f"h{i}" for i in range(len(ops))]
    if include_total_sz:
        ops.append(total_sz(magnets.system))
        labels.append("T")
    for k, a in enumerate(ops):
        if not is_hermitian(a):
            raise DomainError(f"operator {labels[k]} is not Hermitian")
        for b in ops[k + 1:]:
            if commutator_norm(a, b) >= commute_tol:
                raise SimultaneousDiagonalizationError("operators do not commute")
    scale = max(float(np.linalg.norm(a, 2)) for a in ops) or 1.0
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _attempt in range(2):
        vecs = _joint_basis(ops, rng, cluster_tol=1e-7 * scale)
        vals = np.empty((vecs.shape[1], len(ops)))
        worst = 0.0
        for i, op in enumerate(ops):
            ov = op @ vecs
            e = np.real(np.einsum("dk,dk->k", vecs.conj(), ov))
            vals[:, i] = e
            worst = max(worst, float(np.max(np.linalg.norm(ov - vecs * e[None, :], axis=0))))
        if worst < residual_tol:
            return JointSpectrum(vals, vecs, tuple(labels), worst)
    raise SimultaneousDiagonalizationError(
        f"joint eigenbasis residual {worst:.3e} above {residual_tol:.1e} after retry"
    )
