"""Gaudin-algebra generators J^{0,+,-}(λ) realized on a spin system.

All three realizations have the form ``J^a(λ) = sum_i f_i(λ) t_i^a`` with

* rational  f_i(λ) = 1 / (u_i - λ)
* coth      f_i(λ) = q (coth[q (u_i - λ)] + 1)
* tanh      f_i(λ) = q (tanh[q (u_i - λ)] + 1)

The rational one satisfies the rational Gaudin algebra; coth and tanh both
satisfy the q-algebra

    [J+(λ), J-(μ)] = 2 k(λ-μ) (J0(λ) - J0(μ)) + 2q (J0(λ) + J0(μ))
    [J0(λ), J±(μ)] = ±k(λ-μ) (J±(λ) - J±(μ)) ± q (J±(λ) + J±(μ))

with ``k(x) = q coth(q x)`` (``1/x`` and ``q = 0`` in the rational case).
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .couplings import CouplingFamily
from .errors import DomainError, PoleError, UnsupportedFamilyError
from .spin import MINUS, PLUS, ZERO, SpinSystem, _normalize_which, dot_product, embed, lowest_weight_vector

SERIES_CUTOFF = 1e-4
POLE_TOL = 1e-13


class RealizationKind(str, enum.Enum):
    RATIONAL = "rational"
    COTH = "coth"
    TANH = "tanh"


def _z_coth(z: complex) -> complex:
    """z coth z, finite at z = 0."""
    if abs(z) < SERIES_CUTOFF:
        z2 = z * z
        return 1.0 + z2 / 3.0 - z2 * z2 / 45.0
    return z * _coth(z)


# cmath.tanh saturates cleanly for large |Re z|, where sinh/cosh would overflow
def _coth(z: complex) -> complex:
    t = cmath.tanh(z)
    if abs(t) < POLE_TOL:
        raise PoleError(f"coth pole at argument {z}")
    return 1.0 / t


def _tanh(z: complex) -> complex:
    if abs(z.real) < 1.0 and abs(cmath.cosh(z)) < POLE_TOL:
        raise PoleError(f"tanh pole at argument {z}")
    return cmath.tanh(z)


def q_coth(q: float, x: complex) -> complex:
    """``q coth(q x)``, continuous into ``1/x`` as ``q -> 0``."""
    if x == 0:
        raise PoleError("q coth(q x) at x = 0")
    return _z_coth(q * x) / x


@dataclass(frozen=True)
class Realization:
    """A realization of the Gaudin or q-Gaudin algebra on ``system``."""

    system: SpinSystem
    kind: RealizationKind
    q: float = 0.0

    def __post_init__(self):
        kind = RealizationKind(self.kind)
        object.__setattr__(self, "kind", kind)
        q = float(self.q)
        if kind is RealizationKind.RATIONAL and q != 0.0:
            raise DomainError("the rational realization has q = 0")
        if kind is not RealizationKind.RATIONAL and q == 0.0:
            raise DomainError(f"the {kind.value} realization needs q != 0")
        object.__setattr__(self, "q", q)
        # generators are linear in the site weights; cache the site operators
        ops = {k: tuple(embed(self.system, i, k) for i in range(self.system.n_sites)) for k in (ZERO, PLUS, MINUS)}
        object.__setattr__(self, "_site_ops", ops)

    @classmethod
    def rational(cls, system: SpinSystem):
        return cls(system, RealizationKind.RATIONAL)

    @classmethod
    def coth(cls, system: SpinSystem, q: float):
        return cls(system, RealizationKind.COTH, q)

    @classmethod
    def tanh(cls, system: SpinSystem, q: float):
        return cls(system, RealizationKind.TANH, q)

    @classmethod
    def for_family(cls, system: SpinSystem, family: CouplingFamily):
        """The realization whose residues give the magnets of ``family``."""
        if family.tag.value == "rational":
            return cls.rational(system)
        if family.tag.value == "q-deformed":
            return cls.coth(system, family.param)
        raise UnsupportedFamilyError(f"no generator realization for the {family.tag.value} family")

    @property
    def shift(self) -> float:
        """The additive constant q in the q-algebra (0 for rational)."""
        return self.q

    def magnet_family(self) -> CouplingFamily:
        if self.kind is RealizationKind.RATIONAL:
            return CouplingFamily.rational()
        if self.kind is RealizationKind.COTH:
            return CouplingFamily.q_deformed(self.q)
        raise UnsupportedFamilyError("the tanh realization has no poles at the site parameters")

    def label(self) -> str:
        return self.kind.value if self.kind is RealizationKind.RATIONAL else f"{self.kind.value}({self.q:g})"

    # scalar weight functions -------------------------------------------------

    def site_weight(self, i: int, lam: complex) -> complex:
        x = self.system.u[i] - lam
        if self.kind is RealizationKind.RATIONAL:
            if x == 0:
                raise PoleError(f"spectral parameter at site parameter u_{i}")
            return 1.0 / x
        q = self.q
        if self.kind is RealizationKind.COTH:
            if x == 0:
                raise PoleError(f"spectral parameter at site parameter u_{i}")
            return q_coth(q, x) + q
        return q * (_tanh(q * x) + 1.0)

    def site_weight_derivative(self, i: int, lam: complex) -> complex:
        """d f_i / dλ."""
        x = self.system.u[i] - lam
        if self.kind is RealizationKind.RATIONAL:
            if x == 0:
                raise PoleError(f"spectral parameter at site parameter u_{i}")
            return 1.0 / (x * x)
        q = self.q
        if self.kind is RealizationKind.COTH:
            # q^2 / sinh^2(q x) = (q coth)^2 - q^2
            k = q_coth(q, x)
            return k * k - q * q
        t = _tanh(q * x)
        return -q * q * (1.0 - t * t)

    def weights(self, lam: complex) -> np.ndarray:
        return np.array([self.site_weight(i, lam) for i in range(self.system.n_sites)], dtype=complex)

    def weight_derivatives(self, lam: complex) -> np.ndarray:
        return np.array([self.site_weight_derivative(i, lam) for i in range(self.system.n_sites)], dtype=complex)

    def structure_kernel(self, x: complex) -> complex:
        """``1/x`` (rational) or ``q coth(q x)``; multiplies J(λ) - J(μ) in the algebra."""
        if x == 0:
            raise PoleError("structure kernel at zero separation")
        if self.kind is RealizationKind.RATIONAL:
            return 1.0 / x
        return q_coth(self.q, x)

    def structure_kernel_derivative(self, x: complex) -> complex:
        if x == 0:
            raise PoleError("structure kernel at zero separation")
        if self.kind is RealizationKind.RATIONAL:
            return -1.0 / (x * x)
        k = q_coth(self.q, x)
        return -(k * k - self.q * self.q)

    def bethe_kernel(self, x: complex) -> complex:
        """Pairwise term of the Bethe equations: ``1/x`` or ``q (coth(q x) - 1)``."""
        return self.structure_kernel(x) - self.q

    def bethe_kernel_derivative(self, x: complex) -> complex:
        return self.structure_kernel_derivative(x)

    def _combine(self, which, coeffs: np.ndarray) -> np.ndarray:
        ops = self._site_ops[_normalize_which(which)]
        out = np.zeros((self.system.dim, self.system.dim), dtype=complex)
        for c, op in zip(coeffs, ops):
            out += c * op
        return out


def generator(real: Realization, which, lam: complex) -> np.ndarray:
    """``J^which(λ) = sum_i f_i(λ) t_i^which``."""
    return real._combine(which, real.weights(lam))


def generator_derivative(real: Realization, which, lam: complex) -> np.ndarray:
    """``d J^which / dλ``; the λ -> μ limit of the difference quotients."""
    return real._combine(which, real.weight_derivatives(lam))


def generators(real: Realization, lam: complex) -> dict[str, np.ndarray]:
    return {k: generator(real, k, lam) for k in (ZERO, PLUS, MINUS)}


def weight_function(real: Realization, lam: complex) -> complex:
    """Eigenvalue of ``J^0(λ)`` on the lowest-weight vector, ``-sum_i s_i f_i(λ)``."""
    return complex(-np.dot(real.system.spins, real.weights(lam)))


def weight_function_derivative(real: Realization, lam: complex) -> complex:
    return complex(-np.dot(real.system.spins, real.weight_derivatives(lam)))


def lowest_weight_energy(real: Realization, lam: complex) -> complex:
    """``W^2 - W' - 2 q W`` (``q = 0`` for the rational algebra)."""
    w = weight_function(real, lam)
    return w * w - weight_function_derivative(real, lam) - 2.0 * real.shift * w


def _difference_term(real: Realization, which, lam: complex, mu: complex, j_lam, j_mu) -> np.ndarray:
    # k(λ-μ) (J(λ) - J(μ)) with its derivative limit at λ = μ
    if lam == mu:
        return generator_derivative(real, which, lam)
    return real.structure_kernel(lam - mu) * (j_lam - j_mu)


def algebra_residuals(real: Realization, lam: complex, mu: complex) -> dict[str, float]:
    """Frobenius residuals of the six defining commutation relations at (λ, μ).

    ``λ = μ`` is allowed and uses the derivative limit of the kernel terms.
    """
    q = real.shift
    a = generators(real, lam)
    b = a if lam == mu else generators(real, mu)

    def comm(x, y):
        return x @ y - y @ x

    def rhs(which):
        return _difference_term(real, which, lam, mu, a[which], b[which]) + q * (a[which] + b[which])

    return {
        "[J+(l),J-(m)]": float(np.linalg.norm(comm(a[PLUS], b[MINUS]) - 2.0 * rhs(ZERO))),
        "[J0(l),J+(m)]": float(np.linalg.norm(comm(a[ZERO], b[PLUS]) - rhs(PLUS))),
        "[J0(l),J-(m)]": float(np.linalg.norm(comm(a[ZERO], b[MINUS]) + rhs(MINUS))),
        "[J0(l),J0(m)]": float(np.linalg.norm(comm(a[ZERO], b[ZERO]))),
        "[J+(l),J+(m)]": float(np.linalg.norm(comm(a[PLUS], b[PLUS]))),
        "[J-(l),J-(m)]": float(np.linalg.norm(comm(a[MINUS], b[MINUS]))),
    }


def spectral_operator(real: Realization, lam: complex) -> np.ndarray:
    """``H(λ) = J0 J0 + (J+ J- + J- J+) / 2``."""
    g = generators(real, lam)
    return g[ZERO] @ g[ZERO] + 0.5 * (g[PLUS] @ g[MINUS] + g[MINUS] @ g[PLUS])


def spectral_operator_pairs(real: Realization, lam: complex) -> np.ndarray:
    """``H(λ) = sum_{i,j} f_i(λ) f_j(λ) t_i·t_j`` built directly from pair products."""
    f = real.weights(lam)
    n = real.system.n_sites
    out = np.zeros((real.system.dim, real.system.dim), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            c = f[i] * f[j] * (1.0 if i == j else 2.0)
            out += c * dot_product(real.system, i, j)
    return out


def _pole_data(real: Realization, i: int):
    # f_i(λ) = 1/(u_i - λ) + c0 + O(u_i - λ); returns (c0, [f_j(u_i)])
    if real.kind is RealizationKind.TANH:
        raise UnsupportedFamilyError("the tanh realization has no poles at the site parameters")
    i = real.system.check_site(i)
    c0 = real.shift
    others = {j: real.site_weight(j, real.system.u[i]) for j in range(real.system.n_sites) if j != i}
    return c0, others


def residue_at(real: Realization, i: int) -> np.ndarray:
    """``-1/2`` times the coefficient of ``1/(u_i - λ)`` in ``H(λ)``.

    The coefficient is read off analytically from the simple pole of ``f_i``.
    For the rational realization this is ``h_i``; for coth it is
    ``h_i^(q) - q t_i·t_i``. Note the pole is expanded in ``u_i - λ``: the
    conventional residue in ``λ`` is the negative, see :func:`residue`.
    """
    c0, others = _pole_data(real, i)
    sysm = real.system
    out = -c0 * dot_product(sysm, i, i)
    for j, fj in others.items():
        out = out - fj * dot_product(sysm, i, j)
    return out


def residue(real: Realization, i: int) -> np.ndarray:
    """Conventional residue ``Res_{λ = u_i} H(λ)`` (coefficient of ``1/(λ - u_i)``)."""
    return 2.0 * residue_at(real, i)


def lowest_weight_check(real: Realization, lam: complex) -> dict[str, float]:
    """Residuals of ``J-|0> = 0``, ``J0|0> = W|0>`` and ``H|0> = E0|0>``."""
    v = lowest_weight_vector(real.system)
    return {
        "J-|0>": float(np.linalg.norm(generator(real, MINUS, lam) @ v)),
        "J0|0>-W|0>": float(np.linalg.norm(generator(real, ZERO, lam) @ v - weight_function(real, lam) * v)),
        "H|0>-E0|0>": float(np.linalg.norm(spectral_operator(real, lam) @ v - lowest_weight_energy(real, lam) * v)),
    }
