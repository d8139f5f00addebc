"""Algebraic Bethe ansatz for the rational and q-deformed Gaudin algebras.

The Bethe equations on roots ``xi_1 .. xi_n`` read

    W(xi_a) = sum_{b != a} K(xi_a - xi_b)

with ``K(x) = 1/x`` (rational) or ``K(x) = q (coth(q x) - 1)`` (q-algebra).
When they hold, ``J+(xi_1) ... J+(xi_n)|0>`` is a joint eigenvector of
``H(λ)`` and of every magnet ``h_i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .algebra import (
    Realization,
    RealizationKind,
    generator,
    lowest_weight_energy,
    spectral_operator,
    weight_function,
    weight_function_derivative,
)
from .errors import DegenerateStateError, DomainError, PoleError, UnsupportedFamilyError
from .magnet import JointSpectrum
from .spin import PLUS, lowest_weight_vector

MIN_ROOT_SEPARATION = 1e-8
DEDUP_TOL = 1e-6
ESCAPE_WEIGHT = 1e-8


@dataclass(frozen=True)
class BetheState:
    family: str
    roots: tuple[complex, ...]
    residual: float
    iterations: int
    converged: bool

    @property
    def n(self) -> int:
        return len(self.roots)


@dataclass
class SolveResult:
    """Solutions found by :func:`solve_bethe` plus per-start bookkeeping."""

    states: list[BetheState]
    n_starts: int = 0
    diagnostics: dict[str, int] = field(default_factory=dict)

    def __iter__(self):
        return iter(self.states)

    def __len__(self):
        return len(self.states)

    def __getitem__(self, k):
        return self.states[k]


def _period(real: Realization) -> Optional[float]:
    # coth and tanh weights are periodic in λ with period iπ/q
    if real.kind is RealizationKind.RATIONAL:
        return None
    return math.pi / abs(real.q)


def fold_root(real: Realization, xi: complex) -> complex:
    """Representative of ``xi`` with imaginary part in ``[-π/2q, π/2q)``."""
    period = _period(real)
    if period is None:
        return complex(xi)
    im = (xi.imag + period / 2) % period - period / 2
    return complex(xi.real, im)


def _separation(real: Realization, a: complex, b: complex) -> float:
    d = a - b
    period = _period(real)
    if period is not None:
        im = (d.imag + period / 2) % period - period / 2
        d = complex(d.real, im)
    return abs(d)


def _check_roots(real: Realization, roots: Sequence[complex]) -> np.ndarray:
    roots = np.asarray(roots, dtype=complex).ravel()
    for a, b in itertools.combinations(range(len(roots)), 2):
        if _separation(real, roots[a], roots[b]) <= MIN_ROOT_SEPARATION:
            raise PoleError(f"coincident Bethe roots {roots[a]} and {roots[b]}")
    for xi in roots:
        for u in real.system.u:
            if real.kind is not RealizationKind.TANH and _separation(real, xi, u) <= MIN_ROOT_SEPARATION:
                raise PoleError(f"Bethe root {xi} sits on site parameter {u}")
    return roots


def bethe_equations(real: Realization, roots: Sequence[complex]) -> np.ndarray:
    """Vector ``F_a = W(xi_a) - sum_{b != a} K(xi_a - xi_b)``."""
    roots = np.asarray(roots, dtype=complex).ravel()
    out = np.empty(len(roots), dtype=complex)
    for a, xa in enumerate(roots):
        val = weight_function(real, xa)
        for b, xb in enumerate(roots):
            if b != a:
                val -= real.bethe_kernel(xa - xb)
        out[a] = val
    return out


def bethe_jacobian(real: Realization, roots: Sequence[complex]) -> np.ndarray:
    """Holomorphic Jacobian ``dF_a / dxi_b``."""
    roots = np.asarray(roots, dtype=complex).ravel()
    n = len(roots)
    jac = np.zeros((n, n), dtype=complex)
    for a in range(n):
        jac[a, a] = weight_function_derivative(real, roots[a])
        for b in range(n):
            if b == a:
                continue
            kp = real.bethe_kernel_derivative(roots[a] - roots[b])
            jac[a, a] -= kp
            jac[a, b] += kp
    return jac


def bethe_residual(real: Realization, roots: Sequence[complex]) -> float:
    """``max_a |F_a|``; zero for the empty root set."""
    roots = _check_roots(real, roots)
    if len(roots) == 0:
        return 0.0
    return float(np.max(np.abs(bethe_equations(real, roots))))


def _raw_residual(real, roots):
    try:
        f = bethe_equations(real, roots)
    except (PoleError, OverflowError):
        return np.inf, None
    if not np.all(np.isfinite(f)):
        return np.inf, None
    return float(np.max(np.abs(f))), f


def newton(
    real: Realization,
    start: Sequence[complex],
    tol: float = 1e-12,
    max_iter: int = 200,
    max_halvings: int = 20,
) -> tuple[np.ndarray, float, int]:
    """Damped Newton iteration from ``start``; returns (roots, residual, iterations).

    The step is halved (up to ``max_halvings`` times) while the residual does
    not decrease; the iteration stops when no damped step helps.
    """
    xi = np.asarray(start, dtype=complex).copy()
    res, f = _raw_residual(real, xi)
    if f is None:
        return xi, res, 0
    it = 0
    for it in range(1, max_iter + 1):
        if res < tol:
            return xi, res, it - 1
        try:
            step = np.linalg.solve(bethe_jacobian(real, xi), -f)
        except (np.linalg.LinAlgError, PoleError):
            return xi, res, it
        if not np.all(np.isfinite(step)):
            return xi, res, it
        t = 1.0
        for _ in range(max_halvings + 1):
            trial = xi + t * step
            trial_res, trial_f = _raw_residual(real, trial)
            if trial_res < res:
                break
            t *= 0.5
        else:
            return xi, res, it
        xi, res, f = trial, trial_res, trial_f
    return xi, res, it


def _canonical(real, roots) -> tuple[complex, ...]:
    folded = [fold_root(real, x) for x in roots]
    return tuple(sorted(folded, key=lambda z: (round(z.real, 9), round(z.imag, 9))))


def _same_root_set(real, a, b, tol=DEDUP_TOL) -> bool:
    if len(a) != len(b):
        return False
    if len(a) <= 6:
        return any(
            all(_separation(real, x, y) <= tol for x, y in zip(a, perm)) for perm in itertools.permutations(b)
        )
    return all(_separation(real, x, y) <= tol for x, y in zip(a, b))


def default_seeds(real: Realization, n: int, seed: int = 42, tries: int = 3) -> list[np.ndarray]:
    """Deterministic multi-start seeds near clusters of site parameters.

    For every size-``n`` multiset of sites, ``tries`` jittered starts are made:
    roots spread around the spin-weighted centre of the chosen ``u_i``, with
    imaginary offsets so repeated sites do not start on top of each other.
    The tanh weights equal the coth weights translated by ``iπ/2q``, so their
    seeds carry the same translation.
    """
    u = np.asarray(real.system.u)
    shift = 1j * math.pi / (2 * abs(real.q)) if real.kind is RealizationKind.TANH else 0.0
    spins = np.asarray(real.system.spins)
    spacing = float(np.min(np.diff(np.sort(u)))) if len(u) > 1 else 1.0
    rng = np.random.default_rng(seed)
    seeds = []
    for combo in itertools.combinations_with_replacement(range(len(u)), n):
        idx = np.asarray(combo)
        centre = float(np.dot(spins[idx], u[idx]) / spins[idx].sum())
        for k in range(tries):
            scale = spacing * (0.15 + 0.35 * k)
            base = u[idx] if k % 2 == 0 else np.full(n, centre)
            offsets = np.arange(n) - (n - 1) / 2
            jitter = rng.normal(scale=0.25 * scale, size=n) + 1j * (scale * offsets + rng.normal(scale=0.1 * scale, size=n))
            seeds.append(base + 0.5 * scale + jitter + shift)
    return seeds


def _escaped(real: Realization, roots) -> bool:
    # roots drifting to where every site weight vanishes solve the equations trivially
    return any(np.max(np.abs(real.weights(x))) < ESCAPE_WEIGHT for x in roots)


def solve_bethe(
    real: Realization,
    n: int,
    seeds: Optional[Iterable[Sequence[complex]]] = None,
    seed: int = 42,
    tries: int = 3,
    accept_tol: float = 1e-10,
    max_iter: int = 200,
) -> SolveResult:
    """Find solutions of the Bethe equations with ``n`` roots by multi-start Newton.

    Solutions are deduplicated as unordered root sets and returned sorted.
    Failure to converge is reported through ``diagnostics``; it is not an error.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"excitation count must be a positive integer, got {n!r}")
    if n > real.system.max_excitations:
        raise DomainError(f"n={n} exceeds the magnetization bound {real.system.max_excitations}")
    starts = [np.asarray(s, dtype=complex).ravel() for s in seeds] if seeds is not None else []
    if seeds is None:
        starts = default_seeds(real, n, seed=seed, tries=tries)
    diag = {"not_converged": 0, "coincident_or_pole": 0, "escaped": 0, "degenerate_vector": 0, "duplicate": 0}
    found: list[BetheState] = []
    for start in starts:
        if len(start) != n:
            raise DomainError(f"seed {start} does not have {n} roots")
        roots, res, its = newton(real, start, max_iter=max_iter)
        if not res < accept_tol:
            diag["not_converged"] += 1
            continue
        try:
            _check_roots(real, roots)
        except PoleError:
            diag["coincident_or_pole"] += 1
            continue
        if _escaped(real, roots):
            diag["escaped"] += 1
            continue
        try:
            bethe_vector(real, roots)
        except DegenerateStateError:
            diag["degenerate_vector"] += 1
            continue
        canon = _canonical(real, roots)
        if any(_same_root_set(real, canon, s.roots) for s in found):
            diag["duplicate"] += 1
            continue
        found.append(BetheState(real.label(), canon, bethe_residual(real, canon), its, True))
    found.sort(key=lambda s: tuple((round(z.real, 8), round(z.imag, 8)) for z in s.roots))
    return SolveResult(found, len(starts), diag)


def bethe_vector(real: Realization, roots: Sequence[complex], rel_tol: float = 1e-10) -> np.ndarray:
    """``J+(xi_1) ... J+(xi_n) |0>`` (unnormalized)."""
    v = lowest_weight_vector(real.system)
    scale = 1.0
    for xi in reversed(list(roots)):
        jp = generator(real, PLUS, xi)
        scale *= max(float(np.linalg.norm(jp, 2)), np.finfo(float).tiny)
        v = jp @ v
    if np.linalg.norm(v) <= rel_tol * scale:
        raise DegenerateStateError(f"Bethe vector vanishes for roots {tuple(roots)}")
    return v


def bethe_eigenvalue(real: Realization, lam: complex, roots: Sequence[complex]) -> complex:
    """Eigenvalue of ``H(λ)`` on the Bethe vector: ``E0(λ) - 2 sum K(λ - xi)(W(λ) - W(xi))``."""
    e = lowest_weight_energy(real, lam)
    w_lam = weight_function(real, lam)
    for xi in roots:
        if lam == xi:
            raise PoleError("spectral parameter coincides with a Bethe root")
        e -= 2.0 * real.bethe_kernel(lam - xi) * (w_lam - weight_function(real, xi))
    return complex(e)


def magnet_eigenvalues_from_roots(real: Realization, roots: Sequence[complex]) -> np.ndarray:
    """Eigenvalues ``E_{i,n}`` of each magnet ``h_i`` on the Bethe vector.

    ``E_{i,n} = sum_{j != i} s_i s_j K(u_i - u_j) - s_i sum_a K(u_i - xi_a)``.
    """
    if real.kind is RealizationKind.TANH:
        raise UnsupportedFamilyError("the tanh realization has no associated magnets")
    s = real.system.spins
    u = real.system.u
    out = np.zeros(real.system.n_sites, dtype=complex)
    for i in range(real.system.n_sites):
        e = sum(s[i] * s[j] * real.bethe_kernel(u[i] - u[j]) for j in range(len(u)) if j != i)
        for xi in roots:
            if u[i] == xi:
                raise PoleError(f"Bethe root on site parameter u_{i}")
            e -= s[i] * real.bethe_kernel(u[i] - xi)
        out[i] = e
    return out.real


def off_shell_coefficients(real: Realization, lam: complex, xi: complex) -> tuple[complex, complex]:
    """Coefficients of ``J+(λ)|0>`` and ``J+(xi)|0>`` in ``H(λ) J+(xi)|0>`` for a generic ``xi``."""
    k = real.bethe_kernel(lam - xi)
    c_lam = 2.0 * k * weight_function(real, xi)
    c_xi = lowest_weight_energy(real, lam) - 2.0 * k * weight_function(real, lam)
    return complex(c_lam), complex(c_xi)


def off_shell_decomposition(real: Realization, lam: complex, xi: complex) -> dict[str, object]:
    """Least-squares split of ``H(λ) J+(xi)|0>`` over ``J+(λ)|0>`` and ``J+(xi)|0>``."""
    v0 = lowest_weight_vector(real.system)
    a = generator(real, PLUS, lam) @ v0
    b = generator(real, PLUS, xi) @ v0
    target = spectral_operator(real, lam) @ b
    basis = np.stack([a, b], axis=1)
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    closed = off_shell_coefficients(real, lam, xi)
    scale = max(float(np.linalg.norm(target)), 1.0)
    return {
        "coefficients": (complex(coef[0]), complex(coef[1])),
        "closed_form": closed,
        "fit_residual": float(np.linalg.norm(basis @ coef - target)) / scale,
        "closed_form_residual": float(np.linalg.norm(basis @ np.asarray(closed) - target)) / scale,
    }


@dataclass(frozen=True)
class OracleMatch:
    energies: np.ndarray
    rows: np.ndarray
    max_energy_error: float
    overlap: float
    sector: float

    @property
    def matched(self) -> bool:
        return len(self.rows) > 0


def compare_with_oracle(
    real: Realization, roots: Sequence[complex], joint: JointSpectrum, tol: float = 1e-7
) -> OracleMatch:
    """Locate the Bethe state in an exact joint spectrum.

    ``joint`` must come from :func:`simultaneous_spectrum` with total ``S^z``
    included, so that rows are labelled by sector. The overlap is the norm of
    the normalized Bethe vector projected onto all matching joint eigenvectors,
    which stays meaningful when a joint eigenvalue is degenerate.
    """
    if joint.labels[-1] != "T":
        raise DomainError("joint spectrum must include total S^z as its last column")
    energies = magnet_eigenvalues_from_roots(real, roots)
    sector = -sum(real.system.spins) + len(roots)
    target = np.concatenate([energies, [sector]])
    rows = joint.rows_matching(target, tol)
    v = bethe_vector(real, roots)
    v = v / np.linalg.norm(v)
    if len(rows) == 0:
        in_sector = np.nonzero(np.abs(joint.eigenvalues[:, -1] - sector) <= 1e-9)[0]
        err = float(np.min(np.max(np.abs(joint.eigenvalues[in_sector, :-1] - energies), axis=1))) if len(in_sector) else np.inf
        return OracleMatch(energies, rows, err, 0.0, sector)
    err = float(np.max(np.abs(joint.eigenvalues[rows, :-1] - energies)))
    overlap = float(np.linalg.norm(joint.vectors[:, rows].conj().T @ v))
    return OracleMatch(energies, rows, err, overlap, sector)


def sector_coverage(real: Realization, states: Sequence[BetheState], joint: JointSpectrum, tol: float = 1e-7) -> dict:
    """How many joint eigenvectors of a sector are reproduced by the given states."""
    if not states:
        return {"matched_rows": 0, "sector_rows": None, "fraction": 0.0}
    n = states[0].n
    sector = -sum(real.system.spins) + n
    in_sector = set(np.nonzero(np.abs(joint.eigenvalues[:, -1] - sector) <= 1e-9)[0].tolist())
    hit = set()
    for st in states:
        hit.update(int(r) for r in compare_with_oracle(real, st.roots, joint, tol).rows)
    return {
        "matched_rows": len(hit),
        "sector_rows": len(in_sector),
        "fraction": len(hit) / len(in_sector) if in_sector else 0.0,
    }
