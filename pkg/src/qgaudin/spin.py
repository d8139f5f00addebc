"""SU(2) spin representations and their embedding into N-site tensor products.

Conventions: within a site the basis is ordered by descending t0 eigenvalue
(m = s, s-1, ..., -s); sites are ordered left to right as given. With this
ordering the lowest-weight vector is the last standard basis vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError

DEFAULT_MAX_DIM = 4096

# generator labels; "+" and "-" are the ladder operators t^+ = t^1 + i t^2
ZERO, PLUS, MINUS = "0", "+", "-"
_WHICH = {0: ZERO, "0": ZERO, "z": ZERO, "+": PLUS, 1: PLUS, "-": MINUS, -1: MINUS}


def _twice_spin(s) -> int:
    two_s = 2 * float(s)
    k = int(round(two_s))
    if k < 1 or abs(two_s - k) > 1e-12:
        raise DomainError(f"spin must be a positive half-integer, got {s!r}")
    return k


def _normalize_which(which) -> str:
    try:
        return _WHICH[which]
    except (KeyError, TypeError):
        raise DomainError(f"generator label must be one of 0, '+', '-'; got {which!r}") from None


@lru_cache(maxsize=None)
def _generators(two_s: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s = two_s / 2
    m = s - np.arange(two_s + 1)
    t0 = np.diag(m).astype(complex)
    tplus = np.zeros((two_s + 1, two_s + 1), dtype=complex)
    # <m+1| t+ |m> = sqrt(s(s+1) - m(m+1)), Condon-Shortley phase
    for k in range(1, two_s + 1):
        tplus[k - 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    for a in (t0, tplus):
        a.setflags(write=False)
    tminus = tplus.T.copy()
    tminus.setflags(write=False)
    return t0, tplus, tminus


def single_spin_generators(s) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(t0, t+, t-)`` for spin ``s`` as read-only ``(2s+1)``-square arrays.

    They satisfy ``[t+, t-] = 2 t0`` and ``[t0, t±] = ±t±``.
    """
    return _generators(_twice_spin(s))


@dataclass(frozen=True)
class SpinSystem:
    """N sites, each carrying a spin ``s_j`` and a real parameter ``u_j``.

    ``u`` values must be pairwise distinct. The Hilbert dimension
    ``prod(2 s_j + 1)`` must not exceed ``max_dim``.
    """

    spins: tuple[float, ...]
    u: tuple[float, ...]
    max_dim: int = field(default=DEFAULT_MAX_DIM, compare=False)

    def __post_init__(self):
        spins = tuple(_twice_spin(s) / 2 for s in self.spins)
        u = tuple(float(x) for x in self.u)
        if len(spins) == 0:
            raise DomainError("a spin system needs at least one site")
        if len(spins) != len(u):
            raise DomainError(f"{len(spins)} spins but {len(u)} parameters u")
        if not all(np.isfinite(u)):
            raise DomainError("site parameters u must be finite reals")
        seen = {}
        for j, x in enumerate(u):
            if x in seen:
                raise DomainError(f"duplicate site parameter u={x} at sites {seen[x]} and {j}")
            seen[x] = j
        object.__setattr__(self, "spins", spins)
        object.__setattr__(self, "u", u)
        if self.dim > self.max_dim:
            raise DimensionError(f"Hilbert dimension {self.dim} exceeds cap {self.max_dim}")

    @classmethod
    def from_sites(cls, sites: Sequence[tuple[float, float]], max_dim: int = DEFAULT_MAX_DIM):
        """Build from a sequence of ``(spin, u)`` pairs."""
        sites = list(sites)
        return cls(tuple(s for s, _ in sites), tuple(x for _, x in sites), max_dim=max_dim)

    @property
    def n_sites(self) -> int:
        return len(self.spins)

    @property
    def site_dims(self) -> tuple[int, ...]:
        return tuple(int(round(2 * s)) + 1 for s in self.spins)

    @property
    def dim(self) -> int:
        return int(np.prod(self.site_dims))

    @property
    def max_excitations(self) -> int:
        """Largest number of raising steps above the lowest-weight vector."""
        return int(round(sum(2 * s for s in self.spins)))

    def check_site(self, i: int) -> int:
        if not isinstance(i, (int, np.integer)) or not 0 <= i < self.n_sites:
            raise DomainError(f"site index {i!r} out of range for {self.n_sites} sites")
        return int(i)


def embed_local(system: SpinSystem, i: int, local: np.ndarray) -> np.ndarray:
    """Place a single-site matrix at site ``i``: ``I ⊗ ... ⊗ local ⊗ ... ⊗ I``."""
    i = system.check_site(i)
    dims = system.site_dims
    left = int(np.prod(dims[:i]))
    right = int(np.prod(dims[i + 1:]))
    return np.kron(np.kron(np.eye(left), local), np.eye(right))


def embed(system: SpinSystem, i: int, which) -> np.ndarray:
    """Generator ``t_i^which`` (which in 0, '+', '-') on the full Hilbert space."""
    t0, tp, tm = single_spin_generators(system.spins[system.check_site(i)])
    local = {ZERO: t0, PLUS: tp, MINUS: tm}[_normalize_which(which)]
    return embed_local(system, i, local)


def dot_product(system: SpinSystem, i: int, j: int) -> np.ndarray:
    """``t_i · t_j = t_i^0 t_j^0 + (t_i^+ t_j^- + t_i^- t_j^+) / 2``."""
    a0, ap, am = (embed(system, i, w) for w in (ZERO, PLUS, MINUS))
    if i == j:
        b0, bp, bm = a0, ap, am
    else:
        b0, bp, bm = (embed(system, j, w) for w in (ZERO, PLUS, MINUS))
    return a0 @ b0 + 0.5 * (ap @ bm + am @ bp)


def total_sz(system: SpinSystem) -> np.ndarray:
    """``T = sum_j t_j^0``; diagonal in the product basis."""
    diag = reduce(
        lambda acc, s: np.add.outer(acc, s - np.arange(int(round(2 * s)) + 1)).ravel(),
        system.spins[1:],
        system.spins[0] - np.arange(system.site_dims[0]),
    )
    return np.diag(np.asarray(diag, dtype=float)).astype(complex)


def lowest_weight_vector(system: SpinSystem) -> np.ndarray:
    """Unit product state with every site at ``m_j = -s_j``."""
    v = np.zeros(system.dim, dtype=complex)
    v[-1] = 1.0
    return v


def is_hermitian(a: np.ndarray, tol: float = 1e-10) -> bool:
    scale = max(1.0, float(np.linalg.norm(a)))
    return bool(np.linalg.norm(a - a.conj().T) <= tol * scale)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a
