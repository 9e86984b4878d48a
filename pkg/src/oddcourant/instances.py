"""Instance files: algebroids and structures as JSON with polynomial strings.

Courant instance::

    {"dim": 2, "twist": {"F2": [[1, 2, "1"]], "H3": [[1, 2, 3, "x3"]]}}

Indices are 1-based and give the coefficient of ``dx_i ^ dx_j (^ dx_k)``.
Structure instance::

    {"algebroid": <courant instance or fixture name>,
     "F": [[...], ...], "u0": [...], "Gend": [[...], ...]}

Frame order is ``(d_1 .. d_d, e, dx_1 .. dx_d)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .courant import OddExactAlgebroid
from .forms import DifferentialForm
from .poly import Polynomial, PolynomialSyntaxError, parse_polynomial
from .structures import BnAlmostComplex, BnPseudoHermitian

__all__ = [
    "InstanceError",
    "Instance",
    "parse_algebroid",
    "parse_instance",
    "load_instance",
    "fixture_names",
    "load_fixture",
]


class InstanceError(ValueError):
    """Malformed instance file; the message names the offending field."""


@dataclass
class Instance:
    name: str
    algebroid: OddExactAlgebroid
    F: Optional[list] = None
    u0: Optional[list] = None
    Gend: Optional[list] = None

    @property
    def has_structure(self) -> bool:
        return self.F is not None

    def complex_structure(self) -> BnAlmostComplex:
        if self.F is None:
            raise InstanceError(f"{self.name}: no structure block (F, u0)")
        return BnAlmostComplex(self.algebroid, self.F, self.u0)

    def pseudo_hermitian(self) -> BnPseudoHermitian:
        if self.Gend is None:
            raise InstanceError(f"{self.name}: no generalized metric (Gend)")
        return BnPseudoHermitian(self.algebroid, self.Gend, self.F, self.u0)


def _poly(text, d: int, where: str) -> Polynomial:
    if isinstance(text, (int,)) and not isinstance(text, bool):
        text = str(text)
    if not isinstance(text, str):
        raise InstanceError(f"{where}: expected a polynomial string, got {text!r}")
    try:
        return parse_polynomial(text, d)
    except PolynomialSyntaxError as exc:
        raise InstanceError(f"{where}: {exc}") from exc


def _form(entries, d: int, degree: int, where: str) -> DifferentialForm:
    items = []
    for k, entry in enumerate(entries or []):
        if not isinstance(entry, list) or len(entry) != degree + 1:
            raise InstanceError(f"{where}[{k}]: expected {degree} indices and a polynomial")
        idx = entry[:degree]
        if not all(isinstance(i, int) and 1 <= i <= d for i in idx):
            raise InstanceError(f"{where}[{k}]: indices must lie in 1..{d}")
        items.append(([i - 1 for i in idx], _poly(entry[degree], d, f"{where}[{k}]")))
    return DifferentialForm.from_unsorted(d, degree, items)


def parse_algebroid(data) -> OddExactAlgebroid:
    if isinstance(data, str):
        return load_fixture(data).algebroid
    if not isinstance(data, dict) or "dim" not in data:
        raise InstanceError("algebroid: expected an object with 'dim'")
    d = data["dim"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise InstanceError("algebroid.dim: expected a positive integer")
    twist = data.get("twist") or {}
    F2 = _form(twist.get("F2"), d, 2, "twist.F2")
    H3 = _form(twist.get("H3"), d, 3, "twist.H3")
    return OddExactAlgebroid(d, F2, H3)


def _matrix(rows, d: int, N: int, where: str):
    if not isinstance(rows, list) or len(rows) != N or any(not isinstance(r, list) or len(r) != N for r in rows):
        raise InstanceError(f"{where}: expected a {N}x{N} matrix")
    return [[_poly(t, d, f"{where}[{i + 1}][{j + 1}]") for j, t in enumerate(r)] for i, r in enumerate(rows)]


def parse_instance(data, name: str = "<instance>") -> Instance:
    if not isinstance(data, dict):
        raise InstanceError("instance: expected a JSON object")
    if "algebroid" not in data:
        return Instance(name, parse_algebroid(data))
    alg = parse_algebroid(data["algebroid"])
    d, N = alg.dim, alg.rank
    F = _matrix(data["F"], d, N, "F") if "F" in data else None
    u0 = None
    if "u0" in data:
        if not isinstance(data["u0"], list) or len(data["u0"]) != N:
            raise InstanceError(f"u0: expected {N} entries")
        u0 = [_poly(t, d, f"u0[{i + 1}]") for i, t in enumerate(data["u0"])]
    if (F is None) != (u0 is None):
        raise InstanceError("structure block needs both F and u0")
    G = _matrix(data["Gend"], d, N, "Gend") if "Gend" in data else None
    return Instance(name, alg, F, u0, G)


def load_instance(path: Union[str, Path]) -> Instance:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    return parse_instance(data, path.stem)


def _fixture_dir():
    return resources.files("oddcourant") / "fixtures"


def fixture_names():
    return sorted(p.name[:-5] for p in _fixture_dir().iterdir() if p.name.endswith(".json"))


def load_fixture(name: str) -> Instance:
    f = _fixture_dir() / f"{name}.json"
    if not f.is_file():
        raise InstanceError(f"unknown fixture {name!r}")
    return parse_instance(json.loads(f.read_text()), name)


def fixture_path(name: str) -> Path:
    return Path(str(_fixture_dir() / f"{name}.json"))
