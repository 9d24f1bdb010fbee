"""File formats: matrices, partial variograms, statements, data CSV and JSON reports."""

from __future__ import annotations

import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .completion import PartialVariogram
from .config import get_tol
from .eci import CIStatement


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=float)
    return {"d": int(m.shape[0]), "rows": [[float(x) for x in row] for row in m]}


def matrix_from_json(obj: dict) -> np.ndarray:
    m = np.array(obj["rows"], dtype=float)
    if m.shape != (obj["d"], obj["d"]):
        raise ValueError(f"matrix rows do not match d={obj['d']}")
    return m


def read_matrix(path, skip_header: bool = False) -> np.ndarray:
    """A square matrix from JSON {"d", "rows"} or a header-free CSV."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return matrix_from_json(json.loads(text))
    m = np.loadtxt(path, delimiter=",", ndmin=2, skiprows=int(skip_header))
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def write_matrix(m, path) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(m)) + "\n")


def read_partial(path, tol: float | None = None) -> PartialVariogram:
    return PartialVariogram.from_json(json.loads(Path(path).read_text()), tol)


def read_statements(path) -> list[CIStatement]:
    """JSON list of {"A": [...], "B": [...], "C": [...]}."""
    return [CIStatement.from_json(o) for o in json.loads(Path(path).read_text())]


def parse_statement(text: str) -> CIStatement:
    """"1,2|3|4,5" reads as {1,2} _|_ {3} | {4,5}; the conditioning part may be empty."""
    parts = text.split("|")
    if len(parts) not in (2, 3):
        raise ValueError(f"cannot parse statement {text!r}")
    sets = [frozenset(int(v) for v in p.split(",") if v.strip()) for p in parts]
    return CIStatement(*sets)


def read_data(path, skip_header: bool = False) -> np.ndarray:
    """One observation per row, no header unless ``skip_header``."""
    return np.loadtxt(path, delimiter=",", ndmin=2, skiprows=int(skip_header))


def write_data(data, path) -> None:
    np.savetxt(path, np.asarray(data), delimiter=",", fmt="%.17g")


def report(payload: dict, tol: float | None = None) -> dict:
    """Attach the library version and the tolerance in force."""
    return {"version": __version__, "tolerance": get_tol(tol), **payload}


def dump(obj, path=None) -> str:
    """Serialize with shortest round-trip float repr; write to path or stdout."""
    text = json.dumps(obj, indent=2, sort_keys=False, allow_nan=True)
    if path is None:
        sys.stdout.write(text + "\n")
    else:
        Path(path).write_text(text + "\n")
    return text


def load_schema(name: str) -> dict:
    return json.loads(resources.files("hrmodels").joinpath("schemas", f"{name}.json").read_text())

