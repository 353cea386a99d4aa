"""Verification reports: named checks with both sides of an inequality.

Each check records an ``anchor``, a short description of the property it
tests, so a report can be audited without the code at hand.  Reports
serialize to JSON with sorted keys; wall-clock timings live in a separate
``timings`` block so the rest is byte-for-byte reproducible.
"""

from __future__ import annotations

import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


def _clean(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return [_clean(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


@dataclass
class Check:
    name: str
    anchor: str
    lhs: Optional[float]
    rhs: Optional[float]
    slack: float = 0.0
    passed: Optional[bool] = None
    note: str = ""

    def __post_init__(self):
        if self.passed is None:
            self.passed = self.lhs is not None and self.rhs is not None and self.lhs <= self.rhs + self.slack

    def as_dict(self) -> dict:
        out = {"name": self.name, "anchor": self.anchor, "lhs": self.lhs, "rhs": self.rhs,
               "slack": self.slack, "pass": bool(self.passed)}
        if self.note:
            out["note"] = self.note
        return _clean(out)


@dataclass
class VerificationReport:
    command: str
    checks: list = field(default_factory=list)
    environment: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, *args, **kwargs) -> Check:
        c = args[0] if args and isinstance(args[0], Check) else Check(*args, **kwargs)
        self.checks.append(c)
        return c

    @contextmanager
    def timed(self, label: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[label] = self.timings.get(label, 0.0) + time.perf_counter() - t0

    def as_dict(self, with_timings: bool = True) -> dict:
        out = {"command": self.command, "pass": self.passed,
               "checks": [c.as_dict() for c in self.checks],
               "environment": _clean(self.environment), "results": _clean(self.results)}
        if with_timings:
            out["timings"] = _clean(self.timings)
        return out

    def to_json(self, with_timings: bool = True) -> str:
        return json.dumps(self.as_dict(with_timings), sort_keys=True, indent=2, allow_nan=False) + "\n"
