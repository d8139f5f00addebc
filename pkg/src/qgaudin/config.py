"""JSON job configuration and the central tolerance table."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .couplings import CouplingFamily, Family
from .errors import GaudinError
from .spin import DEFAULT_MAX_DIM, SpinSystem

# single source of truth for identity tolerances; "*D" entries are multiplied
# by the Hilbert dimension before use
TOLERANCES: dict[str, float] = {
    "gaudin_equation": 1e-10,
    "symmetry_defect": 1e-12,
    "commutativity": 1e-10,  # *D
    "total_sz": 1e-10,  # *D
    "casimir": 1e-10,  # *D
    "sum_rule": 1e-11,  # *D
    "algebra": 1e-10,  # *D
    "adjoint": 1e-12,
    "spectral_commutativity": 1e-10,  # *D
    "lowest_weight": 1e-10,
    "weight_derivative": 1e-6,
    "residue": 1e-11,  # *D
    "trace_formula": 1e-11,  # *D
    "cybe": 1e-13,
    "qcybe": 1e-12,
    "linear_structure": 1e-10,  # *D
    "bethe_residual": 1e-10,
    "bethe_energy": 1e-7,
    "bethe_overlap": 1e-6,
    "bethe_eigenvector": 1e-8,
    "joint_spectrum": 1e-8,
    "nogo_zero": 1e-10,
    "nogo_recovery": 1e-8,
    "nogo_gap_slope": 0.1,
}
DIMENSION_SCALED = frozenset(
    {
        "commutativity",
        "total_sz",
        "casimir",
        "sum_rule",
        "algebra",
        "spectral_commutativity",
        "residue",
        "trace_formula",
        "linear_structure",
    }
)


class ConfigError(GaudinError):
    """Invalid job configuration (CLI exit code 2)."""


def parse_complex(value: Any) -> complex:
    """Accept a real number, ``{"re": .., "im": ..}`` or ``[re, im]``."""
    if isinstance(value, bool):
        raise ConfigError(f"not a number: {value!r}")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, dict) and set(value) <= {"re", "im"} and "re" in value:
        return complex(float(value["re"]), float(value.get("im", 0.0)))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"cannot read a complex number from {value!r}")


def _reject_unknown(section: str, data: dict, allowed: set[str]) -> None:
    extra = set(data) - allowed
    if extra:
        raise ConfigError(f"unknown field(s) in {section}: {', '.join(sorted(extra))}")


_FAMILY_ALIASES = {
    "rational": Family.RATIONAL,
    "trigonometric": Family.TRIGONOMETRIC,
    "trig": Family.TRIGONOMETRIC,
    "hyperbolic": Family.HYPERBOLIC,
    "q-deformed": Family.Q_DEFORMED,
    "qdeformed": Family.Q_DEFORMED,
    "q": Family.Q_DEFORMED,
}


def parse_family(data: Any) -> CouplingFamily:
    if isinstance(data, str):
        data = {"tag": data}
    if not isinstance(data, dict):
        raise ConfigError("family must be an object with 'tag' and optional 'param'")
    _reject_unknown("family", data, {"tag", "param"})
    tag = _FAMILY_ALIASES.get(str(data.get("tag", "")).lower())
    if tag is None:
        raise ConfigError(f"unknown family tag {data.get('tag')!r}")
    param = data.get("param")
    if tag is Family.RATIONAL:
        if param not in (None, 0, 0.0):
            raise ConfigError("the rational family takes no parameter")
        return CouplingFamily.rational()
    if param is None:
        raise ConfigError(f"the {tag.value} family needs 'param'")
    if isinstance(param, bool) or not isinstance(param, (int, float)):
        raise ConfigError(f"family parameter must be a real number, got {param!r}")
    if float(param) == 0.0:
        raise ConfigError(
            f"{tag.value} with param=0 is the rational limit; use family tag 'rational' instead"
        )
    try:
        return CouplingFamily(tag, float(param))
    except GaudinError as exc:
        raise ConfigError(str(exc)) from exc


def parse_system(data: Any, max_dim: int = DEFAULT_MAX_DIM) -> SpinSystem:
    if not isinstance(data, dict):
        raise ConfigError("system must be an object")
    _reject_unknown("system", data, {"sites", "spins", "u", "max_dim"})
    max_dim = int(data.get("max_dim", max_dim))
    if "sites" in data:
        if "spins" in data or "u" in data:
            raise ConfigError("give either 'sites' or 'spins'+'u', not both")
        sites = data["sites"]
        if not isinstance(sites, list) or not sites:
            raise ConfigError("'sites' must be a non-empty list")
        spins, us = [], []
        for k, site in enumerate(sites):
            if not isinstance(site, dict):
                raise ConfigError(f"site {k} must be an object with 'spin' and 'u'")
            _reject_unknown(f"site {k}", site, {"spin", "u"})
            if "spin" not in site or "u" not in site:
                raise ConfigError(f"site {k} needs both 'spin' and 'u'")
            spins.append(site["spin"])
            us.append(site["u"])
    else:
        if "spins" not in data or "u" not in data:
            raise ConfigError("system needs 'sites' or both 'spins' and 'u'")
        spins, us = list(data["spins"]), list(data["u"])
    try:
        return SpinSystem(tuple(spins), tuple(float(x) for x in us), max_dim=max_dim)
    except (GaudinError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid system: {exc}") from exc


@dataclass(frozen=True)
class JobConfig:
    system: SpinSystem
    family: CouplingFamily
    n: Optional[int] = None
    lambdas: tuple[complex, ...] = ()
    seed: int = 42
    triples: int = 100
    tolerances: dict[str, float] = field(default_factory=dict)
    q_grid: tuple[float, ...] = (0.0, 0.25, 0.5, 1.0)
    lambda_minus_mu: complex = 1.0
    mu: complex = complex(-0.35, 0.2)
    sweep_values: tuple[float, ...] = ()

    def tolerance(self, key: str, scale: float = 1.0) -> float:
        base = self.tolerances.get(key, TOLERANCES[key]) * scale
        if key in DIMENSION_SCALED:
            base *= self.system.dim
        return base

    @classmethod
    def from_dict(cls, data: dict) -> "JobConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        _reject_unknown(
            "config",
            data,
            {"system", "family", "n", "lambdas", "seed", "triples", "tolerances", "q_grid", "lambda_minus_mu", "mu", "sweep"},
        )
        if "system" not in data or "family" not in data:
            raise ConfigError("config needs 'system' and 'family'")
        system = parse_system(data["system"])
        family = parse_family(data["family"])
        n = data.get("n")
        if n is not None:
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                raise ConfigError(f"'n' must be a positive integer, got {n!r}")
            if n > system.max_excitations:
                raise ConfigError(f"n={n} exceeds the magnetization bound sum(2 s_j) = {system.max_excitations}")
        tolerances = data.get("tolerances", {})
        if not isinstance(tolerances, dict):
            raise ConfigError("'tolerances' must be an object")
        _reject_unknown("tolerances", tolerances, set(TOLERANCES))
        for key, val in tolerances.items():
            if isinstance(val, bool) or not isinstance(val, (int, float)) or val <= 0:
                raise ConfigError(f"tolerance {key} must be a positive number")
        seed = data.get("seed", 42)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError("'seed' must be a non-negative integer")
        triples = data.get("triples", 100)
        if isinstance(triples, bool) or not isinstance(triples, int) or triples < 1:
            raise ConfigError("'triples' must be a positive integer")
        sweep = data.get("sweep", {})
        if not isinstance(sweep, dict):
            raise ConfigError("'sweep' must be an object")
        _reject_unknown("sweep", sweep, {"values"})
        try:
            lambdas = tuple(parse_complex(x) for x in data.get("lambdas", ()))
            q_grid = tuple(float(x) for x in data.get("q_grid", cls.q_grid))
            sweep_values = tuple(float(x) for x in sweep.get("values", ()))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if any(v == 0.0 for v in sweep_values):
            raise ConfigError("sweep values must be nonzero; the zero limit is the rational family")
        dlm = parse_complex(data.get("lambda_minus_mu", 1.0))
        if dlm == 0:
            raise ConfigError("'lambda_minus_mu' must be nonzero")
        return cls(
            system=system,
            family=family,
            n=n,
            lambdas=lambdas,
            seed=seed,
            triples=triples,
            tolerances={k: float(v) for k, v in tolerances.items()},
            q_grid=q_grid,
            lambda_minus_mu=dlm,
            mu=parse_complex(data.get("mu", cls.mu)),
            sweep_values=sweep_values,
        )

    @classmethod
    def load(cls, path) -> "JobConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def describe(self) -> dict:
        return {
            "system": {"spins": list(self.system.spins), "u": list(self.system.u), "dim": self.system.dim},
            "family": {"tag": self.family.tag.value, "param": self.family.param},
            "seed": self.seed,
        }
