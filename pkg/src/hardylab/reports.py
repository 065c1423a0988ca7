"""Structured check records and their JSON form."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

SCHEMA_VERSION = 1


@dataclass
class VerificationReport:
    """Outcome of a single numerical check.

    ``value`` is what was computed, ``oracle`` what it was compared against
    (if anything), ``stderr`` the statistical uncertainty of ``value`` and
    ``tolerance`` the acceptance threshold actually applied.
    """

    check: str
    passed: bool
    value: float
    oracle: float | None = None
    stderr: float = 0.0
    tolerance: float = 0.0
    seed: int | None = None
    details: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return to_jsonable(self)


def _clean_float(x: float) -> float | str | None:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def to_jsonable(obj: Any) -> Any:
    """Convert dataclasses / numpy values into plain JSON-serialisable data."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _clean_float(float(obj))
    if hasattr(obj, "value") and hasattr(obj, "name") and type(obj).__module__ != "builtins":
        # enums
        return obj.value
    return obj
