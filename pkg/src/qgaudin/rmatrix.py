"""Linear r-matrix structure of the Gaudin and q-Gaudin algebras.

Kronecker ordering is fixed throughout as

    auxiliary space 1  ⊗  auxiliary space 2  ⊗  Hilbert space

so an auxiliary 4x4 matrix ``r`` acts on the full space as ``r ⊗ I_D``, and
``L(λ) ⊗ I`` puts the auxiliary index of ``L`` on space 1. The L-matrix is

    L(λ) = [[ J0(λ),  J+(λ)],
            [ J-(λ), -J0(λ)]]
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Realization, RealizationKind, generators, q_coth, spectral_operator
from .errors import DomainError, PoleError
from .spin import MINUS, PLUS, ZERO

PERMUTATION = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
    dtype=complex,
)
PERMUTATION.setflags(write=False)
I2 = np.eye(2, dtype=complex)


def permutation_matrix() -> np.ndarray:
    return PERMUTATION.copy()


def rational_r(x: complex) -> np.ndarray:
    """``P / x`` with ``x = λ - μ``."""
    if x == 0:
        raise PoleError("rational r-matrix at zero argument")
    return PERMUTATION / x


def rq(x: complex, q: float) -> np.ndarray:
    """``(q coth(q x) + q) P``; ``rq(x, -q)`` is the companion matrix ``r_{-q}``."""
    if x == 0:
        raise PoleError("r_q at zero argument")
    if q == 0:
        return rational_r(x)
    s = np.sinh(q * x)
    if abs(s) < 1e-13:
        raise PoleError(f"r_q on the coth pole lattice at x={x}")
    return (q_coth(q, x) + q) * PERMUTATION


# placement maps into C^2 ⊗ C^2 ⊗ C^2
def phi12(m: np.ndarray) -> np.ndarray:
    return np.kron(m, I2)


def phi23(m: np.ndarray) -> np.ndarray:
    return np.kron(I2, m)


def phi13(m: np.ndarray) -> np.ndarray:
    # a ⊗ b -> a ⊗ I ⊗ b, applied entrywise to the 4-index tensor
    t = m.reshape(2, 2, 2, 2)  # (a_out, b_out, a_in, b_in)
    out = np.einsum("acbd,ef->aecbfd", t, I2)  # (a, e, c)_out x (b, f, d)_in
    return out.reshape(8, 8)


def _comm(a, b):
    return a @ b - b @ a


def _distinct(*args):
    if len(set(args)) < len(args):
        raise PoleError("Yang-Baxter arguments must be pairwise distinct")


def cybe_residual(lam: complex, mu: complex, sigma: complex, r=rational_r) -> float:
    """``||[r13, r23] + [r12, r13] + [r12, r23]||`` with ``r12 = φ12 r(λ-μ)``, etc.

    ``r`` may be any callable returning a 4x4 matrix, which is how negative
    controls are fed in.
    """
    _distinct(lam, mu, sigma)
    r12 = phi12(r(lam - mu))
    r13 = phi13(r(lam - sigma))
    r23 = phi23(r(mu - sigma))
    return float(np.linalg.norm(_comm(r13, r23) + _comm(r12, r13) + _comm(r12, r23)))


def qcybe_residual(lam: complex, mu: complex, sigma: complex, q: float, flipped: bool = False) -> float:
    """``||[r_{-q}^13, r_q^23] + [r_{-q}^12, r_q^23] + [r_{-q}^12, r_q^13]||``.

    ``flipped=True`` exchanges ``q`` and ``-q`` in the first commutator only,
    giving ``[r_q^13, r_{-q}^23] + ...`` (negative control). Exchanging them in
    every term would just be ``q -> -q``, under which the equation still holds.
    """
    _distinct(lam, mu, sigma)
    m13 = phi13(rq(lam - sigma, q if flipped else -q))
    p23 = phi23(rq(mu - sigma, -q if flipped else q))
    m12 = phi12(rq(lam - mu, -q))
    p13 = phi13(rq(lam - sigma, q))
    return float(np.linalg.norm(_comm(m13, p23) + _comm(m12, p23) + _comm(m12, p13)))


@dataclass(frozen=True)
class LMatrix:
    """2x2 array of operators; ``entries[a][b]`` acts on the Hilbert space."""

    entries: tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]

    @property
    def dim(self) -> int:
        return self.entries[0][0].shape[0]

    def block(self) -> np.ndarray:
        """``(2D) x (2D)`` matrix with the auxiliary index outermost."""
        return np.block([[self.entries[0][0], self.entries[0][1]], [self.entries[1][0], self.entries[1][1]]])


def l_matrix(real: Realization, lam: complex, literal: bool = False) -> LMatrix:
    """L(λ) with J+ upper-right and J- lower-left.

    ``literal=True`` puts J+ in both off-diagonal slots instead; that variant
    does not reproduce ``H(λ)`` through the trace formula.
    """
    g = generators(real, lam)
    lower = g[PLUS] if literal else g[MINUS]
    return LMatrix(((g[ZERO], g[PLUS]), (lower, -g[ZERO])))


def aux_embed(r: np.ndarray, dim: int) -> np.ndarray:
    """4x4 auxiliary matrix acting on aux1 ⊗ aux2 ⊗ Hilbert."""
    return np.kron(r, np.eye(dim))


def l_on_first(lm: LMatrix) -> np.ndarray:
    """``L ⊗ I`` on aux1 ⊗ aux2 ⊗ Hilbert."""
    d = lm.dim
    t = lm.block().reshape(2, d, 2, d)
    return np.einsum("aibj,cd->acibdj", t, I2).reshape(4 * d, 4 * d)


def l_on_second(lm: LMatrix) -> np.ndarray:
    """``I ⊗ L`` on aux1 ⊗ aux2 ⊗ Hilbert."""
    d = lm.dim
    t = lm.block().reshape(2, d, 2, d)
    return np.einsum("aibj,cd->caidbj", t, I2).reshape(4 * d, 4 * d)


def natural_form(real: Realization) -> str:
    return "standard" if real.kind is RealizationKind.RATIONAL else "modified"


def linear_structure_lhs(real: Realization, lam: complex, mu: complex, form: str | None = None) -> np.ndarray:
    """Left-hand side of the linear r-matrix relation as a ``4D x 4D`` matrix.

    ``form="standard"``: ``[L(λ)⊗I, I⊗L(μ)] + [r(λ-μ), L(λ)⊗I + I⊗L(μ)]`` with
    ``r = P/(λ-μ)`` for the rational algebra and ``r = r_q`` otherwise.
    ``form="modified"``: ``[L⊗I, I⊗L] + [r_q, L(λ)⊗I] + [r_{-q}, I⊗L(μ)]``.
    """
    if lam == mu:
        raise PoleError("linear structure needs λ != μ")
    form = form or natural_form(real)
    d = real.system.dim
    a = l_on_first(l_matrix(real, lam))
    b = l_on_second(l_matrix(real, mu))
    q = real.q
    if form == "standard":
        r = aux_embed(rq(lam - mu, q), d)
        return _comm(a, b) + _comm(r, a + b)
    if form == "modified":
        rp = aux_embed(rq(lam - mu, q), d)
        rm = aux_embed(rq(lam - mu, -q), d)
        return _comm(a, b) + _comm(rp, a) + _comm(rm, b)
    raise DomainError(f"unknown linear-structure form {form!r}")


def linear_structure_residual(real: Realization, lam: complex, mu: complex, form: str | None = None) -> float:
    """Frobenius norm of :func:`linear_structure_lhs`."""
    return float(np.linalg.norm(linear_structure_lhs(real, lam, mu, form)))


def trace_formula_check(real: Realization, lam: complex, literal: bool = False) -> float:
    """``|| 1/2 sum_ab L_ab L_ba - H(λ) ||``."""
    e = l_matrix(real, lam, literal=literal).entries
    half_trace = 0.5 * sum(e[a][b] @ e[b][a] for a in range(2) for b in range(2))
    return float(np.linalg.norm(half_trace - spectral_operator(real, lam)))


# --- no-go probe ------------------------------------------------------------

_BASIS_NAMES = ("J0(l)", "J+(l)", "J-(l)", "J0(m)", "J+(m)", "J-(m)")


def _generator_basis(real, lam, mu):
    a = generators(real, lam)
    b = generators(real, mu)
    return [a[ZERO], a[PLUS], a[MINUS], b[ZERO], b[PLUS], b[MINUS]]


def _coefficients(blocks: np.ndarray, basis: list[np.ndarray]) -> tuple[np.ndarray, float]:
    # blocks: (..., D, D); least-squares coefficients on the generator basis
    mat = np.stack([b.ravel() for b in basis], axis=1)
    lead = blocks.shape[:-2]
    rhs = blocks.reshape(-1, blocks.shape[-2] * blocks.shape[-1]).T
    coef, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    leftover = float(np.linalg.norm(mat @ coef - rhs))
    return coef.T.reshape(*lead, len(basis)), leftover


def _split_aux(m: np.ndarray, d: int) -> np.ndarray:
    # (4D x 4D) -> (4, 4, D, D) auxiliary blocks
    return m.reshape(4, d, 4, d).transpose(0, 2, 1, 3)


@dataclass(frozen=True)
class NoGoResult:
    q: float
    residual: float
    r: np.ndarray
    rank: int
    projection_residual: float
    r23_constraints: tuple[complex, complex]

    @property
    def r23_gap(self) -> complex:
        return self.r23_constraints[0] - self.r23_constraints[1]


def trial_system(real: Realization, lam: complex, mu: complex) -> tuple[np.ndarray, np.ndarray, float]:
    """Affine map ``r -> coefficients`` of the trial relation with an unknown r.

    The trial relation is ``[L(λ)⊗I, I⊗L(μ)] + [r, L(λ)⊗I + I⊗L(μ)] = 0``.
    Each auxiliary entry is a combination of the six generator values
    ``J^a(λ), J^a(μ)``; returns ``(A, b, leftover)`` with the coefficient
    vector equal to ``A @ vec(r) + b`` (row-major ``vec``) and ``leftover`` the
    part of the entries outside the generator span.
    """
    if lam == mu:
        raise PoleError("trial relation needs λ != μ")
    d = real.system.dim
    a = l_on_first(l_matrix(real, lam))
    b = l_on_second(l_matrix(real, mu))
    basis = _generator_basis(real, lam, mu)
    const, left0 = _coefficients(_split_aux(_comm(a, b), d), basis)
    s = a + b
    cols = []
    leftover = left0
    for k in range(16):
        e = np.zeros(16, dtype=complex)
        e[k] = 1.0
        ek = aux_embed(e.reshape(4, 4), d)
        c, left = _coefficients(_split_aux(_comm(ek, s), d), basis)
        leftover = max(leftover, left)
        cols.append(c.ravel())
    return np.stack(cols, axis=1), const.ravel(), leftover


def r23_constraints(real: Realization, lam: complex, mu: complex) -> tuple[complex, complex]:
    """Values of ``r_23`` forced by two single coefficients of the trial relation.

    The first comes from the ``J-(λ)`` coefficient of entry (2,1), the second
    from the ``J+(μ)`` coefficient of entry (1,3) (1-based auxiliary indices).
    For the q-algebra they are ``q coth(q(λ-μ)) ± q`` and differ by ``2q``.
    """
    amat, bvec, _ = trial_system(real, lam, mu)
    k23 = 1 * 4 + 2  # row-major index of r_23

    def solve_for_r23(entry, basis_idx):
        row = (entry[0] * 4 + entry[1]) * 6 + basis_idx
        return -bvec[row] / amat[row, k23]

    return complex(solve_for_r23((1, 0), 2)), complex(solve_for_r23((0, 2), 4))


def no_go_probe(real: Realization, lam: complex, mu: complex) -> NoGoResult:
    """Best least-squares r-matrix for the trial relation with a standard r.

    Commutators cannot see the identity component of ``r``; that gauge is
    fixed by shifting the solution so that ``r_22 = 0``, as in ``P``.
    The residual is measured in the coefficient space of the generator basis,
    so it does not depend on the chosen spin system.
    """
    amat, bvec, leftover = trial_system(real, lam, mu)
    sol, *_ = np.linalg.lstsq(amat, -bvec, rcond=None)
    residual = float(np.linalg.norm(amat @ sol + bvec))
    rank = int(np.linalg.matrix_rank(amat, tol=1e-9 * max(1.0, np.linalg.norm(amat))))
    r = sol.reshape(4, 4)
    r = r - r[1, 1] * np.eye(4)
    return NoGoResult(real.q, residual, r, rank, leftover, r23_constraints(real, lam, mu))
