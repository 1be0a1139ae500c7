"""State descriptions and grid files.

State specs are JSON::

    {"spacing": 1.0,
     "terms": [{"type": "gaussian", "n0": 0, "sigma_tilde": 2.0, "q0a": 0.0,
                "coeff": [1.0, 0.0]}]}

Each term is a normalized delta or Gaussian component and ``coeff`` is its
complex weight as ``[re, im]``; the weighted sum is renormalized.  A mixed
state is given instead as ``{"density": {"n_min": 0, "real": [[...]],
"imag": [[...]]}}``.

Grids are CSV (header ``m,k,W``, one sample per line, ``m`` then ``k``
ascending) or JSON (``{"meta", "m_values", "k_values", "values"}``).  Floats
are written with ``repr`` so a write/read cycle is exact.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import re
import tempfile
from dataclasses import dataclass
from typing import Any

import numpy as np

from .core import WignerGrid, k_nodes
from .errors import StateError
from .states import (DEFAULT_TAIL_EPS, DensityOperator, GaussianParams,
                     make_delta, make_gaussian, superpose)

CSV_HEADER = ["m", "k", "W"]
_PLACEHOLDER = re.compile(r"^(-?)\$([A-Za-z_]\w*)$")


class SpecError(StateError):
    """A state description is malformed."""


@dataclass(frozen=True)
class Term:
    type: str
    n0: int
    coeff: complex = 1.0
    sigma_tilde: float | None = None
    q0a: float = 0.0


@dataclass(frozen=True)
class StateSpec:
    spacing: float = 1.0
    terms: tuple[Term, ...] = ()
    density: DensityOperator | None = None


@dataclass(frozen=True)
class RunConfig:
    n_k: int = 4096
    tail_eps: float = DEFAULT_TAIL_EPS
    tol: float = 1e-10
    output_format: str = "csv"

    def as_dict(self) -> dict:
        return {"n_k": self.n_k, "tail_eps": self.tail_eps, "tol": self.tol,
                "output_format": self.output_format}


def _as_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(f"{what} must be an integer, got {value!r}")
    if float(value) != int(value):
        raise SpecError(f"{what} must be an integer, got {value!r}")
    return int(value)


def _as_float(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(f"{what} must be a number, got {value!r}")
    return float(value)


def _parse_coeff(raw) -> complex:
    if raw is None:
        return 1.0 + 0j
    if not (isinstance(raw, list) and len(raw) == 2):
        raise SpecError(f"coeff must be a [re, im] pair, got {raw!r}")
    return complex(_as_float(raw[0], "coeff re"), _as_float(raw[1], "coeff im"))


def _parse_term(raw: Any, index: int) -> Term:
    if not isinstance(raw, dict):
        raise SpecError(f"term {index} must be an object")
    kind = raw.get("type")
    if kind not in ("delta", "gaussian"):
        raise SpecError(f"term {index}: type must be 'delta' or 'gaussian', got {kind!r}")
    if "n0" not in raw:
        raise SpecError(f"term {index}: missing n0")
    n0 = _as_int(raw["n0"], f"term {index} n0")
    coeff = _parse_coeff(raw.get("coeff"))
    if kind == "delta":
        return Term("delta", n0, coeff)
    if "sigma_tilde" not in raw:
        raise SpecError(f"term {index}: gaussian terms need sigma_tilde")
    sigma = _as_float(raw["sigma_tilde"], f"term {index} sigma_tilde")
    if not sigma > 0:
        raise SpecError(f"term {index}: sigma_tilde must be positive")
    q0a = _as_float(raw.get("q0a", 0.0), f"term {index} q0a")
    return Term("gaussian", n0, coeff, sigma, q0a)


def parse_spec(data: Any) -> StateSpec:
    """Validate a decoded JSON spec."""
    if not isinstance(data, dict):
        raise SpecError("spec must be a JSON object")
    spacing = _as_float(data.get("spacing", 1.0), "spacing")
    if not spacing > 0:
        raise SpecError("spacing must be positive")
    if "density" in data:
        raw = data["density"]
        try:
            mat = np.asarray(raw["real"], dtype=float) + 1j * np.asarray(
                raw.get("imag", np.zeros_like(raw["real"])), dtype=float)
            n_min = _as_int(raw.get("n_min", 0), "density n_min")
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"malformed density block: {exc}") from exc
        return StateSpec(spacing, (), DensityOperator(mat, n_min, spacing))
    terms = data.get("terms")
    if not isinstance(terms, list) or not terms:
        raise SpecError("spec needs a non-empty 'terms' list or a 'density' block")
    parsed = tuple(_parse_term(t, i) for i, t in enumerate(terms))
    if all(t.coeff == 0 for t in parsed):
        raise SpecError("all coefficients are zero")
    return StateSpec(spacing, parsed)


def load_spec(path: str) -> StateSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: invalid JSON ({exc})") from exc
    return parse_spec(data)


def build_state(spec: StateSpec, tail_eps: float = DEFAULT_TAIL_EPS):
    """PureState for term specs, DensityOperator for density specs."""
    if spec.density is not None:
        return spec.density
    parts = []
    for term in spec.terms:
        if term.type == "delta":
            parts.append(make_delta(term.n0, spec.spacing))
        else:
            params = GaussianParams(term.n0, term.sigma_tilde, term.q0a)
            parts.append(make_gaussian(params, spec.spacing, tail_eps))
    return superpose(parts, [t.coeff for t in spec.terms])


def resolve_template(data: Any, bindings: dict[str, float]) -> Any:
    """Replace ``"$name"`` / ``"-$name"`` strings by bound values."""
    if isinstance(data, dict):
        return {key: resolve_template(val, bindings) for key, val in data.items()}
    if isinstance(data, list):
        return [resolve_template(val, bindings) for val in data]
    if isinstance(data, str):
        match = _PLACEHOLDER.match(data)
        if match:
            sign, name = match.groups()
            if name not in bindings:
                raise SpecError(f"template placeholder ${name} has no sweep axis")
            value = bindings[name]
            return -value if sign else value
    return data


def parse_axis(text: str) -> tuple[str, np.ndarray]:
    """``name=start:stop:count`` into a linspace of ``count`` values."""
    try:
        name, rng = text.split("=", 1)
        start, stop, count = rng.split(":")
        values = np.linspace(float(start), float(stop), int(count))
    except ValueError as exc:
        raise SpecError(f"bad sweep axis {text!r}; expected name=start:stop:count") from exc
    if int(count) < 1:
        raise SpecError(f"sweep axis {name!r} needs at least one value")
    values = [int(v) if float(v).is_integer() else float(v) for v in values]
    return name.strip(), values


# -- grid files ------------------------------------------------------------

def grid_to_csv(grid: WignerGrid) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    k = grid.k_values
    for m, row in zip(grid.m_values, grid.values):
        for kj, w in zip(k, row):
            buf.write(f"{int(m)},{float(kj)!r},{float(w)!r}\n")
    return buf.getvalue()


def grid_to_json(grid: WignerGrid, meta: dict | None = None) -> str:
    payload = {
        "meta": {"spacing": grid.spacing, "n_k": grid.n_k,
                 "max_imag_residue": grid.max_imag_residue, **(meta or {})},
        "m_values": [int(m) for m in grid.m_values],
        "k_values": [float(k) for k in grid.k_values],
        "values": [[float(w) for w in row] for row in grid.values],
    }
    return json.dumps(payload) + "\n"


def _grid_from_columns(m_col, k_col, w_col, spacing, residue=0.0) -> WignerGrid:
    m_vals = np.unique(m_col)
    if not np.array_equal(m_vals, np.arange(m_vals[0], m_vals[-1] + 1)):
        raise ValueError("grid rows must be consecutive integers")
    n_k = len(k_col) // len(m_vals)
    if n_k * len(m_vals) != len(k_col):
        raise ValueError("every row must have the same number of k samples")
    order = np.lexsort((k_col, m_col))
    values = np.asarray(w_col)[order].reshape(len(m_vals), n_k)
    ks = np.asarray(k_col)[order].reshape(len(m_vals), n_k)
    if not np.all(ks == k_nodes(n_k)[None, :]):
        raise ValueError("k values are not the uniform grid nodes")
    return WignerGrid(int(m_vals[0]), values, spacing, residue)


def grid_from_csv(text: str, spacing: float = 1.0) -> WignerGrid:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != CSV_HEADER:
        raise ValueError(f"CSV header must be {','.join(CSV_HEADER)}")
    rows = [r for r in reader if r]
    m_col = np.array([int(r[0]) for r in rows])
    k_col = np.array([float(r[1]) for r in rows])
    w_col = np.array([float(r[2]) for r in rows])
    return _grid_from_columns(m_col, k_col, w_col, spacing)


def grid_from_json(text: str) -> WignerGrid:
    data = json.loads(text)
    values = np.asarray(data["values"], dtype=float)
    m_values = np.asarray(data["m_values"], dtype=int)
    k_values = np.asarray(data["k_values"], dtype=float)
    meta = data.get("meta", {})
    if not np.all(k_values == k_nodes(values.shape[1])):
        raise ValueError("k values are not the uniform grid nodes")
    if not np.array_equal(m_values, np.arange(m_values[0], m_values[0] + values.shape[0])):
        raise ValueError("m values must be consecutive integers matching the rows")
    return WignerGrid(int(m_values[0]), values, float(meta.get("spacing", 1.0)),
                      float(meta.get("max_imag_residue", 0.0)))


def read_grid(path: str, spacing: float = 1.0) -> WignerGrid:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return grid_from_json(text)
    return grid_from_csv(text, spacing)


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to a temporary sibling and rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".lw-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def records_to_csv(records: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for rec in records:
        buf.write(",".join(_fmt(rec[c]) for c in columns) + "\n")
    return buf.getvalue()


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float) and math.isfinite(value):
        return repr(value)
    return str(value)


__all__ = [
    "SpecError", "Term", "StateSpec", "RunConfig", "parse_spec", "load_spec", "build_state",
    "resolve_template", "parse_axis", "grid_to_csv", "grid_to_json", "grid_from_csv",
    "grid_from_json", "read_grid", "write_atomic", "records_to_csv",
]
