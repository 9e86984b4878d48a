"""Verification reports and their structured-text (JSON) rendering."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

from .poly import Polynomial
from .scalars import GaussianRational

SCHEMA = "oddcourant-report/1"

__all__ = ["Check", "Stage", "Report", "SCHEMA", "to_jsonable"]


def to_jsonable(obj):
    """Exact values become strings so reports stay exact and deterministic."""
    if isinstance(obj, (Polynomial, Fraction, GaussianRational)):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_jsonable"):
        return obj.to_jsonable()
    return obj


@dataclass
class Check:
    name: str
    passed: bool
    witness: Optional[Any] = None
    # Checks with claimed=False are informational; they never affect exit codes.
    claimed: bool = True

    def to_jsonable(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"name": self.name, "pass": bool(self.passed)}
        if not self.claimed:
            out["claimed"] = False
        if self.witness is not None:
            out["witness"] = to_jsonable(self.witness)
        return out


@dataclass
class Stage:
    stage: str
    postconditions: List[Check] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, passed: bool, witness=None, claimed: bool = True) -> Check:
        c = Check(name, bool(passed), None if passed else witness, claimed)
        self.postconditions.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.postconditions if c.claimed)

    def first_failure(self) -> Optional[Check]:
        for c in self.postconditions:
            if c.claimed and not c.passed:
                return c
        return None

    def check(self, name: str) -> Check:
        for c in self.postconditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_jsonable(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "stage": self.stage,
            "pass": self.passed,
            "postconditions": [c.to_jsonable() for c in self.postconditions],
        }
        if self.data:
            out["data"] = to_jsonable(self.data)
        return out


@dataclass
class Report:
    command: str
    stages: List[Stage] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.stages)

    def stage(self, name: str) -> Stage:
        for s in self.stages:
            if s.stage == name:
                return s
        raise KeyError(name)

    def to_jsonable(self) -> Dict[str, Any]:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "meta": to_jsonable(self.meta),
            "pass": self.passed,
            "stages": [s.to_jsonable() for s in self.stages],
        }

    def render(self) -> str:
        return json.dumps(self.to_jsonable(), indent=2, ensure_ascii=False) + "\n"
