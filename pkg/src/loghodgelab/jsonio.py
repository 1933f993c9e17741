"""JSON input formats and canonical report serialization.

Every rational is serialized as a string "p/q" (or "n" for integers) so no
consumer ever sees a float.  Validation errors carry a JSON pointer to the
offending field.  Report dumping is canonical (sorted keys, fixed indent,
trailing newline) so identical inputs produce byte-identical reports.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Optional

from .conecx import Cell, IntersectionData
from .linalg import RationalMatrix
from .monodromy import NilpotentOperator
from .toric import Fan, QDivisor
from .trop import CellWeights
from .weights import WeightFunction
from .complexes import CochainComplex, FilteredComplex


class SchemaError(ValueError):
    """Malformed input; ``pointer`` locates the offending field."""

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer or "/"
        super().__init__(f"{self.pointer}: {message}")


def parse_rational(value: Any, pointer: str) -> Fraction:
    if isinstance(value, bool):
        raise SchemaError(pointer, "expected a rational string or integer, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise SchemaError(pointer, f"not a rational 'p/q' string: {value!r}") from None
    raise SchemaError(pointer, f"expected a rational string or integer, got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _expect(condition: bool, pointer: str, message: str):
    if not condition:
        raise SchemaError(pointer, message)


def _expect_keys(obj: dict, pointer: str, required: set[str], optional: set[str] = frozenset()):
    _expect(isinstance(obj, dict), pointer, "expected an object")
    for key in required:
        if key not in obj:
            raise SchemaError(pointer, f"missing required field {key!r}")
    for key in obj:
        if key not in required | set(optional):
            raise SchemaError(f"{pointer}/{key}", "unknown field")


# --- intersection data ------------------------------------------------------------


def load_intersection_data(doc: Any, pointer: str = "") -> IntersectionData:
    _expect_keys(doc, pointer, {"components", "strata"}, {"ray_coordinates"})
    comps = doc["components"]
    _expect(isinstance(comps, list) and all(isinstance(x, str) for x in comps),
            f"{pointer}/components", "expected a list of strings")
    strata = doc["strata"]
    _expect(isinstance(strata, list), f"{pointer}/strata", "expected a list")
    cells = []
    for i, raw in enumerate(strata):
        sp = f"{pointer}/strata/{i}"
        _expect_keys(raw, sp, {"components"}, {"tag"})
        sub = raw["components"]
        _expect(isinstance(sub, list) and sub and all(isinstance(x, str) for x in sub),
                f"{sp}/components", "expected a nonempty list of strings")
        tag = raw.get("tag", "0")
        _expect(isinstance(tag, str), f"{sp}/tag", "expected a string")
        try:
            cells.append(Cell(tuple(sorted(sub)), tag))
        except ValueError as exc:
            raise SchemaError(sp, str(exc)) from None
    rays = None
    if "ray_coordinates" in doc:
        raw_rays = doc["ray_coordinates"]
        _expect(isinstance(raw_rays, dict), f"{pointer}/ray_coordinates", "expected an object")
        rays = {}
        for name, vec in raw_rays.items():
            rp = f"{pointer}/ray_coordinates/{name}"
            _expect(isinstance(vec, list) and vec and all(
                isinstance(x, int) and not isinstance(x, bool) for x in vec),
                rp, "expected a nonempty list of integers")
            rays[name] = tuple(vec)
    return IntersectionData(list(comps), cells, rays)


def dump_intersection_data(data: IntersectionData) -> dict:
    out = {
        "components": sorted(data.components),
        "strata": [{"components": list(c.components), "tag": c.tag}
                   for c in sorted(data.strata)],
    }
    if data.ray_coordinates is not None:
        out["ray_coordinates"] = {k: list(v) for k, v in sorted(data.ray_coordinates.items())}
    return out


# --- weights ----------------------------------------------------------------------


def load_weights(doc: Any, pointer: str = "") -> tuple[Optional[WeightFunction], Optional[dict[str, Fraction]]]:
    """Returns (ray weights, per-cell weights keyed by cell key); exactly one
    of the two is populated."""
    _expect(isinstance(doc, dict), pointer, "expected an object")
    has_rays = "rays" in doc
    has_cells = "cells" in doc
    _expect_keys(doc, pointer, set(), {"rays", "cells"})
    _expect(has_rays != has_cells, pointer,
            "expected exactly one of the fields 'rays' or 'cells'")
    if has_rays:
        raw = doc["rays"]
        _expect(isinstance(raw, dict) and raw, f"{pointer}/rays", "expected a nonempty object")
        values = {name: parse_rational(v, f"{pointer}/rays/{name}")
                  for name, v in raw.items()}
        return WeightFunction(values), None
    raw = doc["cells"]
    _expect(isinstance(raw, dict) and raw, f"{pointer}/cells", "expected a nonempty object")
    values = {key: parse_rational(v, f"{pointer}/cells/{key}") for key, v in raw.items()}
    return None, values


def cell_weights_for(complex_, cell_values: dict[str, Fraction]) -> CellWeights:
    values = {}
    for key, v in cell_values.items():
        cell = complex_.find_cell(key)
        values[cell] = v
    return CellWeights(values)


# --- fans and divisors -------------------------------------------------------------


def load_fan(doc: Any, pointer: str = "") -> Fan:
    _expect_keys(doc, pointer, {"rays", "cones"}, {"names"})
    rays = doc["rays"]
    _expect(isinstance(rays, list) and rays, f"{pointer}/rays", "expected a nonempty list")
    for i, ray in enumerate(rays):
        _expect(isinstance(ray, list) and ray and all(
            isinstance(x, int) and not isinstance(x, bool) for x in ray),
            f"{pointer}/rays/{i}", "expected a nonempty list of integers")
    cones = doc["cones"]
    _expect(isinstance(cones, list) and cones, f"{pointer}/cones", "expected a nonempty list")
    for i, cone in enumerate(cones):
        _expect(isinstance(cone, list) and all(
            isinstance(x, int) and not isinstance(x, bool) for x in cone),
            f"{pointer}/cones/{i}", "expected a list of ray indices")
    names = doc.get("names")
    if names is not None:
        _expect(isinstance(names, list) and all(isinstance(x, str) for x in names),
                f"{pointer}/names", "expected a list of strings")
    return Fan(rays, cones, names)


def load_divisor(doc: Any, fan: Fan, pointer: str = "") -> QDivisor:
    _expect_keys(doc, pointer, {"coefficients"})
    raw = doc["coefficients"]
    _expect(isinstance(raw, list), f"{pointer}/coefficients",
            "expected a list, one rational per ray")
    _expect(len(raw) == len(fan.rays), f"{pointer}/coefficients",
            f"expected {len(fan.rays)} coefficients, got {len(raw)}")
    coeffs = {i: parse_rational(v, f"{pointer}/coefficients/{i}")
              for i, v in enumerate(raw)}
    return QDivisor(coeffs)


# --- nilpotent operators --------------------------------------------------------------


def load_nilpotent(doc: Any, pointer: str = "") -> NilpotentOperator:
    _expect_keys(doc, pointer, {"matrix"})
    raw = doc["matrix"]
    _expect(isinstance(raw, list) and raw, f"{pointer}/matrix", "expected a nonempty list of rows")
    n = len(raw)
    entries = {}
    for i, row in enumerate(raw):
        _expect(isinstance(row, list) and len(row) == n, f"{pointer}/matrix/{i}",
                f"expected a row of length {n} (square matrix)")
        for j, v in enumerate(row):
            entries[(i, j)] = parse_rational(v, f"{pointer}/matrix/{i}/{j}")
    return NilpotentOperator(RationalMatrix(n, n, entries))


# --- generic complexes ------------------------------------------------------------------


def _load_matrix(raw: Any, rows: int, cols: int, pointer: str) -> RationalMatrix:
    _expect(isinstance(raw, list) and len(raw) == rows, pointer,
            f"expected {rows} rows, got {len(raw) if isinstance(raw, list) else type(raw).__name__}")
    entries = {}
    for i, row in enumerate(raw):
        _expect(isinstance(row, list) and len(row) == cols, f"{pointer}/{i}",
                f"expected {cols} entries")
        for j, v in enumerate(row):
            entries[(i, j)] = parse_rational(v, f"{pointer}/{i}/{j}")
    return RationalMatrix(rows, cols, entries)


def load_generic_complex(doc: Any, pointer: str = "") -> tuple[CochainComplex, Optional[list]]:
    """A bounded complex plus an optional filtration (list of levels; each
    level lists, per degree, the basis columns of the subspace)."""
    _expect_keys(doc, pointer, {"min_degree", "dims"}, {"differentials", "filtration"})
    min_degree = doc["min_degree"]
    _expect(isinstance(min_degree, int) and not isinstance(min_degree, bool),
            f"{pointer}/min_degree", "expected an integer")
    raw_dims = doc["dims"]
    _expect(isinstance(raw_dims, list) and raw_dims and all(
        isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in raw_dims),
        f"{pointer}/dims", "expected a nonempty list of nonnegative integers")
    dims = {min_degree + i: d for i, d in enumerate(raw_dims)}
    raw_diffs = doc.get("differentials", [])
    _expect(isinstance(raw_diffs, list) and len(raw_diffs) <= max(len(raw_dims) - 1, 0),
            f"{pointer}/differentials",
            f"expected at most {max(len(raw_dims) - 1, 0)} matrices")
    diffs = {}
    for i, raw in enumerate(raw_diffs):
        k = min_degree + i
        diffs[k] = _load_matrix(raw, dims[k + 1], dims[k], f"{pointer}/differentials/{i}")
    try:
        complex_ = CochainComplex(dims, diffs)
    except ValueError as exc:
        raise SchemaError(f"{pointer}/differentials", str(exc)) from None
    filtration = None
    if "filtration" in doc:
        raw_filt = doc["filtration"]
        _expect(isinstance(raw_filt, list), f"{pointer}/filtration", "expected a list of levels")
        filtration = []
        for li, raw_level in enumerate(raw_filt):
            lp = f"{pointer}/filtration/{li}"
            _expect(isinstance(raw_level, list) and len(raw_level) == len(raw_dims), lp,
                    f"expected one basis list per degree ({len(raw_dims)})")
            level = {}
            for i, raw_cols in enumerate(raw_level):
                k = min_degree + i
                cp = f"{lp}/{i}"
                _expect(isinstance(raw_cols, list), cp, "expected a list of basis columns")
                cols = []
                for ci, col in enumerate(raw_cols):
                    _expect(isinstance(col, list) and len(col) == dims[k], f"{cp}/{ci}",
                            f"expected a column of length {dims[k]}")
                    cols.append(tuple(parse_rational(v, f"{cp}/{ci}/{vi}")
                                      for vi, v in enumerate(col)))
                level[k] = RationalMatrix.from_columns(cols, dims[k])
            filtration.append(level)
    return complex_, filtration


def build_filtered(complex_: CochainComplex, filtration: Optional[list]) -> FilteredComplex:
    from .linalg import RationalMatrix as RM
    full = {k: RM.identity(complex_.dim(k)) for k in complex_.degrees()}
    levels = [full]
    if filtration:
        levels.extend(filtration)
    return FilteredComplex(complex_, levels)


# --- canonical output --------------------------------------------------------------------


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
