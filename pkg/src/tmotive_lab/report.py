"""Deterministic JSON verification reports."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction


def jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, float) and x in (float("inf"), float("-inf")):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "detail": self.detail}


@dataclass
class Report:
    object: str
    t_deg: int
    prec: int
    residual_max_valuation: object = None
    checks: list[Check] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(passed), detail))
        return bool(passed)

    def to_dict(self) -> dict:
        out = {
            "object": self.object,
            "precision": {"t_deg": self.t_deg, "prec": self.prec},
            "residual_max_valuation": jsonable(self.residual_max_valuation),
            "checks": [c.to_dict() for c in self.checks],
        }
        out.update(jsonable(self.extra))
        return out

    def to_json(self) -> str:
        return dumps(self.to_dict())


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2)
