"""Machine-readable reports with lossless JSON round-tripping."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np


def encode(obj: Any) -> Any:
    """Convert numpy/complex values to plain JSON types; complex -> ``{"re", "im"}``."""
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [encode(x) for x in obj.tolist()] if obj.dtype != object else [encode(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    return obj


def decode(obj: Any) -> Any:
    if isinstance(obj, dict):
        if set(obj) == {"re", "im"}:
            return complex(obj["re"], obj["im"])
        return {k: decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [decode(x) for x in obj]
    return obj


@dataclass
class IdentityEntry:
    """One verified identity. ``comparison`` is ``"<="`` (residual bound) or ``">="`` (gap bound)."""

    id: str
    residual: float
    tolerance: float
    anchor: str
    comparison: str = "<="

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.residual):
            return False
        if self.comparison == ">=":
            return self.residual >= self.tolerance
        return self.residual <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "comparison": self.comparison,
            "passed": self.passed,
            "anchor": self.anchor,
        }


@dataclass
class IdentityReport:
    command: str
    entries: list[IdentityEntry] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)
    tables: dict[str, list[dict]] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def add(self, id: str, residual: float, tolerance: float, anchor: str, comparison: str = "<=") -> IdentityEntry:
        entry = IdentityEntry(id, float(residual), float(tolerance), anchor, comparison)
        self.entries.append(entry)
        return entry

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list[IdentityEntry]:
        return [e for e in self.entries if not e.passed]

    def payload(self) -> dict:
        """Everything except timings; identical inputs give identical payloads."""
        return {
            "command": self.command,
            "passed": self.passed,
            "metadata": encode(self.metadata),
            "entries": [e.to_dict() for e in self.entries],
            "tables": encode(self.tables),
        }

    def to_dict(self) -> dict:
        out = self.payload()
        out["timings"] = {k: float(v) for k, v in self.timings.items()}
        return out

    def to_json(self, include_timings: bool = True) -> str:
        data = self.to_dict() if include_timings else self.payload()
        return json.dumps(data, indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "IdentityReport":
        entries = [
            IdentityEntry(e["id"], e["residual"], e["tolerance"], e["anchor"], e.get("comparison", "<="))
            for e in data.get("entries", [])
        ]
        return cls(
            command=data["command"],
            entries=entries,
            metadata=decode(data.get("metadata", {})),
            tables=decode(data.get("tables", {})),
            timings=dict(data.get("timings", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> "IdentityReport":
        return cls.from_dict(json.loads(text))

    def summary_lines(self) -> list[str]:
        lines = []
        for e in self.entries:
            flag = "PASS" if e.passed else "FAIL"
            lines.append(f"{flag} {e.id}: {e.residual:.3e} {e.comparison} {e.tolerance:.1e}")
        return lines
