"""Command-line front door: parse input documents, dispatch computations,
emit a human-readable table or a canonical JSON report.

Exit codes: 0 success, 1 validation failure (diagnostics on stderr), 2
malformed input (JSON pointer of the offending field on stderr).  Reports
carry a provenance block (input hashes, tool version, option values) and are
byte-identical across runs for identical inputs and options.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional

from . import __version__
from . import jsonio
from .complexes import spectral_sequence, degeneration_check
from .conecx import ConeComplexError, build_cone_complex, simplicial_cohomology
from .jsonio import SchemaError, canonical_json, format_rational
from .localmodel import (
    HOLOMORPHIC,
    LOGARITHMIC,
    LocalModel,
    LocalModelError,
    assemble_stalk,
    koszul_local_cohomology,
)
from .monodromy import MonodromyError, jordan_type, stratum_weight, weight_filtration
from .toric import FanError, QDivisor, divisor_cohomology, e1_sum_check, log_hodge_numbers
from .trop import TropError, weight_filtration_ss, weighted_complex
from .weights import WeightError, face_compatibility, validate_convexity, validate_positivity

DEFAULT_MAX_DIM = 2000

VALIDATION_ERRORS = (ConeComplexError, WeightError, TropError, FanError,
                     LocalModelError, MonodromyError, ValueError)


class ValidationFailure(Exception):
    """Computation ran but the verdict is invalid (exit 1)."""

    def __init__(self, message: str, report: Optional[dict] = None):
        super().__init__(message)
        self.report = report


def _max_dim() -> int:
    raw = os.environ.get("LHL_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        return int(raw)
    except ValueError:
        raise SchemaError("LHL_MAX_DIM", f"not an integer: {raw!r}") from None


def _check_cap(size: int, what: str):
    cap = _max_dim()
    if size > cap:
        raise ValidationFailure(
            f"{what} needs dimension {size}, above the LHL_MAX_DIM cap of {cap}")


def _read_json(path: str, label: str) -> tuple[dict, dict]:
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise SchemaError(f"/{label}", f"cannot read {path}: {exc}") from None
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"/{label}", f"invalid JSON in {path}: {exc}") from None
    meta = {"file": p.name, "sha256": hashlib.sha256(data).hexdigest()}
    return doc, meta


def _provenance(inputs: dict, options: dict) -> dict:
    return {
        "tool": "loghodgelab",
        "version": __version__,
        "inputs": {k: inputs[k] for k in sorted(inputs)},
        "options": {k: options[k] for k in sorted(options)},
    }


def _emit(args, command: str, result: dict, inputs: dict, options: dict,
          table_lines: list[str]) -> None:
    report = {"command": command, "provenance": _provenance(inputs, options),
              "result": result}
    if args.format == "json":
        text = canonical_json(report)
    else:
        text = "\n".join(table_lines) + "\n"
    if args.out:
        out = Path(args.out)
        fd, tmp = tempfile.mkstemp(dir=str(out.parent) or ".", prefix=out.name)
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
            os.replace(tmp, out)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    else:
        sys.stdout.write(text)


def _parse_flavor(value: str) -> str:
    if value == "holo":
        return HOLOMORPHIC
    if value == "log":
        return LOGARITHMIC
    raise SchemaError("/flavor", f"unknown flavor {value!r} (expected holo or log)")


def _load_complex_and_weights(args):
    doc_c, meta_c = _read_json(args.complex, "complex")
    data = jsonio.load_intersection_data(doc_c)
    complex_ = build_cone_complex(data)
    _check_cap(max((complex_.cell_count(p) for p in complex_.cells_by_dim), default=0),
               "cone complex cochain spaces")
    doc_w, meta_w = _read_json(args.weights, "weights")
    ray_w, cell_w = jsonio.load_weights(doc_w)
    return complex_, ray_w, cell_w, {"complex": meta_c, "weights": meta_w}


# --- commands -----------------------------------------------------------------------


def cmd_cone_complex(args) -> int:
    doc, meta = _read_json(args.infile, "in")
    data = jsonio.load_intersection_data(doc)
    complex_ = build_cone_complex(data)
    _check_cap(max((complex_.cell_count(p) for p in complex_.cells_by_dim), default=0),
               "cone complex cochain spaces")
    cohomology = simplicial_cohomology(complex_)
    result = {
        "cells_per_dim": {str(p): complex_.cell_count(p) for p in complex_.cells_by_dim},
        "cells": {str(p): [c.key() for c in complex_.cells(p)] for p in complex_.cells_by_dim},
        "euler_characteristic": complex_.euler_characteristic(),
        "cohomology": {str(k): v for k, v in sorted(cohomology.items())},
    }
    lines = ["cone complex"]
    for p in sorted(complex_.cells_by_dim):
        lines.append(f"  {p}-cells: {complex_.cell_count(p)}")
    lines.append(f"  euler characteristic: {complex_.euler_characteristic()}")
    for k, v in sorted(cohomology.items()):
        lines.append(f"  H^{k} = {v}")
    _emit(args, "cone-complex", result, {"in": meta}, {}, lines)
    return 0


def cmd_validate_weights(args) -> int:
    complex_, ray_w, cell_w, inputs = _load_complex_and_weights(args)
    if ray_w is None:
        raise SchemaError("/weights", "validate-weights expects ray weights "
                                      "(field 'rays')")
    positivity = validate_positivity(ray_w, complex_)
    result = {"positivity": positivity.to_json_dict()}
    lines = ["weight validation",
             f"  positivity: {'valid' if positivity.valid else 'INVALID'}"]
    for ray, value in positivity.offenders:
        lines.append(f"    ray {ray} has nonpositive weight {format_rational(value)}")
    convexity = None
    if complex_.ray_coordinates is not None and positivity.valid:
        convexity = validate_convexity(ray_w, complex_)
        result["convexity"] = convexity.to_json_dict()
        lines.append(f"  convexity: {'valid' if convexity.valid else 'INVALID'}")
        for v in convexity.violations:
            lines.append(f"    {v.describe()}")
    if positivity.valid:
        coeffs = face_compatibility(ray_w, complex_)
        result["face_coefficients"] = {
            cell: [{"face": face, "coefficient": format_rational(co)}
                   for face, co in pairs]
            for cell, pairs in sorted(coeffs.items())}
        lines.append("  face coefficients:")
        for cell, pairs in sorted(coeffs.items()):
            rendered = ", ".join(f"{face}: {format_rational(co)}" for face, co in pairs)
            lines.append(f"    {cell} = {rendered}")
    valid = positivity.valid and (convexity is None or convexity.valid)
    result["valid"] = valid
    lines.append(f"  verdict: {'valid' if valid else 'INVALID'}")
    _emit(args, "validate-weights", result, inputs, {}, lines)
    if not valid:
        detail = "; ".join(v.describe() for v in (convexity.violations if convexity else []))
        print(f"validation failed: {detail or 'nonpositive weights'}", file=sys.stderr)
        return 1
    return 0


def _trop_complex(args):
    complex_, ray_w, cell_w, inputs = _load_complex_and_weights(args)
    weights = ray_w if ray_w is not None else jsonio.cell_weights_for(complex_, cell_w)
    return complex_, weighted_complex(complex_, weights), inputs


def cmd_trop_cohomology(args) -> int:
    _, trop, inputs = _trop_complex(args)
    from .trop import tropical_cohomology
    dims = tropical_cohomology(trop)
    result = {"cohomology": {str(k): v for k, v in sorted(dims.items())}}
    lines = ["weighted tropical cohomology"]
    for k, v in sorted(dims.items()):
        lines.append(f"  H^{k} = {v}")
    _emit(args, "trop-cohomology", result, inputs, {}, lines)
    return 0


def cmd_trop_ss(args) -> int:
    _, trop, inputs = _trop_complex(args)
    thresholds = None
    options = {}
    if args.thresholds:
        thresholds = [jsonio.parse_rational(part.strip(), "/thresholds")
                      for part in args.thresholds.split(",") if part.strip()]
        options["thresholds"] = [format_rational(t) for t in thresholds]
    report = weight_filtration_ss(trop, thresholds)
    result = report.to_json_dict()
    lines = ["weight filtration spectral sequence",
             f"  thresholds: {', '.join(format_rational(t) for t in report.thresholds)}",
             f"  degenerates at first page: {'yes' if report.degenerates_at_e1 else 'no'}"]
    if report.first_nonzero_differential is not None:
        lines.append(f"  first nonzero differential on page {report.first_nonzero_differential}")
    totals = ", ".join(f"H^{k}={v}" for k, v in sorted(report.e_infinity_totals.items()))
    lines.append(f"  limit totals: {totals}")
    _emit(args, "trop-ss", result, inputs, options, lines)
    return 0


def cmd_log_hodge(args) -> int:
    doc, meta = _read_json(args.fan, "fan")
    fan = jsonio.load_fan(doc)
    inputs = {"fan": meta}
    options = {"twist": args.twist}
    if args.twist == "zero":
        twist = QDivisor.zero(fan)
    else:
        doc_t, meta_t = _read_json(args.twist, "twist")
        twist = jsonio.load_divisor(doc_t, fan)
        inputs["twist"] = meta_t
        options["twist"] = "file"
    table = log_hodge_numbers(fan, twist)
    result = {"table": table.to_json_dict()}
    lines = ["log Hodge numbers h^q(forms^p twisted)"]
    header = "  p\\q " + " ".join(f"{q:>4}" for q in range(fan.rank + 1))
    lines.append(header)
    for p in range(fan.rank + 1):
        row = " ".join(f"{table.entry(p, q):>4}" for q in range(fan.rank + 1))
        lines.append(f"  {p:>3} {row}")
    if twist.is_zero():
        check = e1_sum_check(table)
        result["e1_sum_check"] = check.to_json_dict()
        verdict = "PASS" if check.passed else "FAIL"
        lines.append(f"  e1-sum check: {verdict}")
        for k, (total, expected, ok) in sorted(check.per_degree.items()):
            lines.append(f"    degree {k}: {total} (expected {expected}) "
                         f"{'ok' if ok else 'MISMATCH'}")
    _emit(args, "log-hodge", result, inputs, options, lines)
    return 0


def cmd_divisor_cohomology(args) -> int:
    doc, meta = _read_json(args.fan, "fan")
    fan = jsonio.load_fan(doc)
    doc_d, meta_d = _read_json(args.divisor, "divisor")
    divisor = jsonio.load_divisor(doc_d, fan)
    floored = divisor.floor()
    h = divisor_cohomology(fan, floored)
    result = {
        "floored_divisor": {str(i): v for i, v in floored.items()},
        "cohomology": {str(q): v for q, v in sorted(h.items())},
    }
    lines = ["divisor cohomology",
             "  floored divisor: " + ", ".join(f"D{i}:{v}" for i, v in floored.items())]
    for q, v in sorted(h.items()):
        lines.append(f"  h^{q} = {v}")
    _emit(args, "divisor-cohomology", result, {"fan": meta, "divisor": meta_d}, {}, lines)
    return 0


def cmd_obstruction_stalk(args) -> int:
    flavor = _parse_flavor(args.flavor)
    model = LocalModel(args.n, args.r, args.window)
    _check_cap((2 * model.window + 1) ** model.n * 2 ** model.n,
               "local model section space")
    report = assemble_stalk(model, flavor)
    result = report.to_json_dict()
    lines = [f"obstruction stalk (n={model.n}, r={model.r}, window={model.window}, "
             f"source={flavor})"]
    for p in sorted(report.direct):
        lines.append(f"  degree {p}: direct {report.direct[p]}, "
                     f"assembled {report.assembled.get(p, 0)}")
    lines.append(f"  dual-method match: {'yes' if report.matches else 'NO'}")
    options = {"n": args.n, "r": args.r, "window": args.window, "flavor": args.flavor}
    _emit(args, "obstruction-stalk", result, {}, options, lines)
    if not report.matches:
        print("assembled Mayer-Vietoris stalk disagrees with the direct cone",
              file=sys.stderr)
        return 1
    return 0


def cmd_local_cohomology(args) -> int:
    model = LocalModel(args.n, args.r, args.window)
    _check_cap((2 * model.window + 1) ** model.n * 2 ** model.n,
               "local model section space")
    subset = [int(part) for part in args.subset.split(",") if part.strip()]
    dims = koszul_local_cohomology(model, subset, args.form_degree)
    result = {
        "subset": sorted(set(subset)),
        "form_degree": args.form_degree,
        "graded_dims": {",".join(map(str, mu)): v for mu, v in sorted(dims.items())},
        "total": sum(dims.values()),
    }
    lines = [f"local cohomology supported on z_I, I={sorted(set(subset))}, "
             f"form degree {args.form_degree}",
             f"  total dimension in window: {sum(dims.values())}"]
    for mu, v in sorted(dims.items()):
        lines.append(f"  multidegree ({','.join(map(str, mu))}): {v}")
    options = {"n": args.n, "r": args.r, "window": args.window,
               "subset": args.subset, "form_degree": args.form_degree}
    _emit(args, "local-cohomology", result, {}, options, lines)
    return 0


def cmd_monodromy(args) -> int:
    doc, meta = _read_json(args.infile, "in")
    operator = jsonio.load_nilpotent(doc)
    _check_cap(operator.dimension, "monodromy operator")
    filtration = weight_filtration(operator, args.center)
    partition = jordan_type(operator)
    weight = stratum_weight(operator)
    result = {
        "dimension": operator.dimension,
        "jordan_type": list(partition),
        "stratum_weight": format_rational(weight),
        "weight_filtration": filtration.to_json_dict(),
    }
    lines = ["monodromy weight data",
             f"  dimension: {operator.dimension}",
             f"  jordan type: {list(partition)}",
             f"  stratum weight: {format_rational(weight)}"]
    for l, d in filtration.level_dims().items():
        lines.append(f"  dim W_{l} = {d}")
    for l, d in filtration.graded_dims().items():
        lines.append(f"  dim Gr_{l} = {d}")
    _emit(args, "monodromy", result, {"in": meta}, {"center": args.center}, lines)
    return 0


def cmd_spectral_sequence(args) -> int:
    doc, meta = _read_json(args.infile, "in")
    complex_, filtration = jsonio.load_generic_complex(doc)
    _check_cap(max(complex_.dims.values(), default=0), "complex")
    fc = jsonio.build_filtered(complex_, filtration)
    pages = spectral_sequence(fc, args.r_max)
    ok, first = degeneration_check(fc)
    result = {
        "pages": [p.to_json_dict() for p in pages],
        "degenerates_at_e1": ok,
        "first_nonzero_differential": first,
        "e_infinity_totals": {str(k): v for k, v in pages[-1].total_dims().items()},
    }
    lines = ["filtration spectral sequence",
             f"  degenerates at first page: {'yes' if ok else 'no'}"]
    if first is not None:
        lines.append(f"  first nonzero differential on page {first}")
    for page in pages:
        entries = ", ".join(f"E^{{{p},{q}}}={v}"
                            for (p, q), v in sorted(page.entries.items()))
        lines.append(f"  page {page.r}: {entries or 'empty'}")
    options = {}
    if args.r_max is not None:
        options["r_max"] = args.r_max
    _emit(args, "spectral-sequence", result, {"in": meta}, options, lines)
    return 0


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lhl",
        description="Exact-arithmetic computations on cone complexes, weight "
                    "functions, toric log Hodge numbers, logarithmic local "
                    "models, monodromy filtrations and weighted tropical "
                    "cohomology.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the report to this file (atomic)")
        p.add_argument("--format", choices=("table", "json"), default="table")

    p = sub.add_parser("cone-complex", help="build a cone complex from intersection data")
    p.add_argument("--in", dest="infile", required=True)
    common(p)
    p.set_defaults(func=cmd_cone_complex)

    p = sub.add_parser("validate-weights", help="positivity, convexity and face coefficients")
    p.add_argument("--complex", required=True)
    p.add_argument("--weights", required=True)
    common(p)
    p.set_defaults(func=cmd_validate_weights)

    p = sub.add_parser("trop-cohomology", help="weighted tropical cohomology dims")
    p.add_argument("--complex", required=True)
    p.add_argument("--weights", required=True)
    common(p)
    p.set_defaults(func=cmd_trop_cohomology)

    p = sub.add_parser("trop-ss", help="sublevel weight filtration spectral sequence")
    p.add_argument("--complex", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--thresholds", help="comma-separated rational thresholds")
    common(p)
    p.set_defaults(func=cmd_trop_ss)

    p = sub.add_parser("log-hodge", help="log Hodge table of a smooth complete fan")
    p.add_argument("--fan", required=True)
    p.add_argument("--twist", default="zero",
                   help="'zero' or a path to a divisor file")
    common(p)
    p.set_defaults(func=cmd_log_hodge)

    p = sub.add_parser("divisor-cohomology", help="h^q of a divisor on a fan")
    p.add_argument("--fan", required=True)
    p.add_argument("--divisor", required=True)
    common(p)
    p.set_defaults(func=cmd_divisor_cohomology)

    p = sub.add_parser("obstruction-stalk",
                       help="direct cone vs Mayer-Vietoris assembled stalk")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--flavor", choices=("holo", "log"), default="log")
    common(p)
    p.set_defaults(func=cmd_obstruction_stalk)

    p = sub.add_parser("local-cohomology",
                       help="graded local cohomology supported on boundary coordinates")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--subset", required=True, help="comma-separated coordinates, 1-based")
    p.add_argument("--form-degree", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_local_cohomology)

    p = sub.add_parser("monodromy", help="Jordan type and monodromy weight filtration")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--center", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_monodromy)

    p = sub.add_parser("spectral-sequence", help="pages of a filtered complex")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--r-max", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_spectral_sequence)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return 2
    except ValidationFailure as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 1
    except VALIDATION_ERRORS as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
