"""Coupling coefficients w_ij^alpha of the Gaudin magnets and the Gaudin-equation check.

Four solution families are supported:

* rational        w^a = 1/du
* trigonometric   w^0 = p cot(p du),   w^1 = w^2 = p / sin(p du)
* hyperbolic      w^0 = p coth(p du),  w^1 = w^2 = p / sinh(p du)
* q-deformed      w^a = q coth(q du) - q

where ``du = u_i - u_j``. The first three are odd in ``du``; the q-deformed
family instead obeys ``w(du) + w(-du) = -2q``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .errors import DomainError, PoleError

# below this |x| the cot/coth/csc/csch kernels switch to a Laurent series
SERIES_CUTOFF = 1e-4


class Family(str, enum.Enum):
    RATIONAL = "rational"
    TRIGONOMETRIC = "trigonometric"
    HYPERBOLIC = "hyperbolic"
    Q_DEFORMED = "q-deformed"


@dataclass(frozen=True)
class CouplingFamily:
    """A solution family of the Gaudin equation with its real parameter.

    ``param`` is ``p`` for the trigonometric/hyperbolic families, ``q`` for
    the q-deformed family and ``None`` for the rational one. The zero-parameter
    limits are represented by :meth:`rational`, never by a tiny parameter.
    """

    tag: Family
    param: Optional[float] = None

    def __post_init__(self):
        tag = Family(self.tag)
        object.__setattr__(self, "tag", tag)
        if tag is Family.RATIONAL:
            if self.param is not None:
                raise DomainError("the rational family takes no parameter")
            return
        if self.param is None:
            raise DomainError(f"the {tag.value} family needs a real parameter")
        if isinstance(self.param, complex):
            raise DomainError("family parameters must be real")
        param = float(self.param)
        if not math.isfinite(param):
            raise DomainError("family parameters must be finite")
        if param == 0.0:
            raise DomainError(
                f"{tag.value} with zero parameter is the rational family; use CouplingFamily.rational()"
            )
        object.__setattr__(self, "param", param)

    @classmethod
    def rational(cls):
        return cls(Family.RATIONAL)

    @classmethod
    def trigonometric(cls, p: float):
        return cls(Family.TRIGONOMETRIC, p)

    @classmethod
    def hyperbolic(cls, p: float):
        return cls(Family.HYPERBOLIC, p)

    @classmethod
    def q_deformed(cls, q: float):
        return cls(Family.Q_DEFORMED, q)

    @property
    def isotropic(self) -> bool:
        """True when all three components share one coefficient."""
        return self.tag in (Family.RATIONAL, Family.Q_DEFORMED)

    def w(self, alpha: int, du: float) -> float:
        return w(self, alpha, du)

    def label(self) -> str:
        return self.tag.value if self.param is None else f"{self.tag.value}({self.param:g})"


# Laurent series around x = 0, each with the 1/x pole included
def _x_coth(x: float) -> float:
    """x * coth(x), finite at 0."""
    if abs(x) < SERIES_CUTOFF:
        x2 = x * x
        return 1.0 + x2 / 3.0 - x2 * x2 / 45.0
    return x / math.tanh(x)


def _x_cot(x: float) -> float:
    if abs(x) < SERIES_CUTOFF:
        x2 = x * x
        return 1.0 - x2 / 3.0 - x2 * x2 / 45.0
    return x / math.tan(x)


def _x_csc(x: float) -> float:
    if abs(x) < SERIES_CUTOFF:
        x2 = x * x
        return 1.0 + x2 / 6.0 + 7.0 * x2 * x2 / 360.0
    return x / math.sin(x)


def _x_csch(x: float) -> float:
    if abs(x) < SERIES_CUTOFF:
        x2 = x * x
        return 1.0 - x2 / 6.0 + 7.0 * x2 * x2 / 360.0
    return x / math.sinh(x)


def _check_alpha(alpha: int) -> int:
    if alpha not in (0, 1, 2):
        raise DomainError(f"component index must be 0, 1 or 2, got {alpha!r}")
    return alpha


def w(family: CouplingFamily, alpha: int, du: float) -> float:
    """Coupling coefficient ``w^alpha(u_i - u_j)`` for ``du = u_i - u_j``."""
    _check_alpha(alpha)
    du = float(du)
    if du == 0.0:
        raise PoleError("coupling evaluated at coincident parameters (du = 0)")
    tag = family.tag
    if tag is Family.RATIONAL:
        return 1.0 / du
    p = family.param
    x = p * du
    if tag is Family.Q_DEFORMED:
        # q coth(q du) = (x coth x) / du; the -q shift is applied after the pole part
        return _x_coth(x) / du - p
    if tag is Family.HYPERBOLIC:
        return (_x_coth(x) if alpha == 0 else _x_csch(x)) / du
    if tag is Family.TRIGONOMETRIC:
        k = round(x / math.pi)
        if k != 0 and abs(x - k * math.pi) <= 1e-14 * max(1.0, abs(x)):
            raise PoleError(f"trigonometric coupling at sin(p du) = 0 (p du = {k} pi)")
        return (_x_cot(x) if alpha == 0 else _x_csc(x)) / du
    raise DomainError(f"unknown family {tag!r}")


CouplingLike = Union[CouplingFamily, Callable[[int, float], float]]


def _coupling_fn(family: CouplingLike) -> Callable[[int, float], float]:
    if isinstance(family, CouplingFamily):
        return family.w
    return family


def gaudin_residual(family: CouplingLike, perm, ui: float, uj: float, uk: float) -> float:
    """|w_ij^a w_jk^c + w_ji^b w_ik^c - w_ik^a w_jk^b| for upper indices ``perm = (a, b, c)``.

    ``family`` may also be a plain callable ``(alpha, du) -> w``; this is how
    tests feed in couplings that are not solutions.
    """
    a, b, c = (_check_alpha(x) for x in perm)
    if sorted((a, b, c)) != [0, 1, 2]:
        raise DomainError(f"upper indices must be a permutation of (0, 1, 2), got {perm!r}")
    if len({ui, uj, uk}) < 3:
        raise PoleError("Gaudin equation needs three distinct parameters")
    f = _coupling_fn(family)
    val = f(a, ui - uj) * f(c, uj - uk) + f(b, uj - ui) * f(c, ui - uk) - f(a, ui - uk) * f(b, uj - uk)
    return abs(val)


def symmetry_defect(family: CouplingLike, alpha: int, du: float) -> float:
    """``w(du) + w(-du)``: zero for the odd families, ``-2q`` for the q-deformed one."""
    f = _coupling_fn(family)
    return f(alpha, du) + f(alpha, -du)


def expected_symmetry_defect(family: CouplingFamily) -> float:
    return -2.0 * family.param if family.tag is Family.Q_DEFORMED else 0.0
