"""Structured run reports and their JSON encoding.

Witness coordinates are written as decimal strings carrying the exact
binary value of each float (25 significant digits), so a report can be
parsed back into bit-identical points.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Any

import numpy as np

SCHEMA = 1
WITNESS_DIGITS = 25


def encode_float(v: float) -> str:
    return f"{Decimal(float(v)):.{WITNESS_DIGITS - 1}e}"


def encode_logx(logx) -> list[str]:
    return [encode_float(v) for v in np.asarray(logx, dtype=float)]


def decode_logx(items) -> np.ndarray:
    return np.array([float(Decimal(s)) for s in items])


def _plain(obj: Any) -> Any:
    """Reduce numpy scalars/arrays and objects with ``to_dict`` to JSON types."""
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


@dataclass
class RunReport:
    command: str
    config: dict = field(default_factory=dict)
    results: list = field(default_factory=list)
    wall_time: float = 0.0
    seed: int = 0
    precision_mode: str = "fast"
    schema: int = SCHEMA

    def __post_init__(self):
        self.config = _plain(self.config)
        self.results = _plain(self.results)

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "wall_time": self.wall_time,
            "seed": self.seed,
            "precision_mode": self.precision_mode,
        }

    def payload(self) -> str:
        """Canonical JSON without the wall time, for determinism comparisons."""
        d = self.to_dict()
        d.pop("wall_time")
        return json.dumps(d, sort_keys=True)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls(
            command=d["command"],
            config=d["config"],
            results=d["results"],
            wall_time=d["wall_time"],
            seed=d["seed"],
            precision_mode=d["precision_mode"],
            schema=d["schema"],
        )

    @classmethod
    def loads(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))
