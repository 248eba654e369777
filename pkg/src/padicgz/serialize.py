"""On-disk formats: deterministic JSON documents and value formatting.

Three document kinds live here: boundary-measure files, gz-instance files,
and line-delimited report records.  Writers are canonical (sorted keys, fixed
separators, trailing newline) so identical inputs produce byte-identical
files.  Loaders re-check the redundant fields a writer emits -- a declared
total that disagrees with the leaf sum is an additivity violation, a
non-integer mass an integrality violation -- so hand-edited files fail with
the name of the invariant they broke.
"""

from __future__ import annotations

import json
from typing import Dict

from .errors import (DepthError, InstanceError, MeasureFormatError,
                     UnsupportedError)
from .padic import PadicScalar, PrimeContext, QuadScalar
from .projline import BoundaryMeasure

SCHEMA_VERSION = 1

MEASURE_KIND = "boundary-measure"
INSTANCE_KIND = "gz-instance"

INSTANCE_SECTIONS = ("primes", "class_model", "galois_model", "measures",
                     "characters", "unit_indices")


# ---------------------------------------------------------------------------
# canonical JSON


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def save_document(obj, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def load_document(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise InstanceError(
            f"{path}: parse error at line {e.lineno}, column {e.colno}: "
            f"{e.msg}") from None
    except OSError as e:
        raise InstanceError(f"{path}: {e.strerror or e}") from None
    if not isinstance(doc, dict):
        raise InstanceError(f"{path}: top level must be an object")
    return doc


def report_line(record: dict) -> str:
    """One line-delimited report record; schema_version always present."""
    rec = {"schema_version": SCHEMA_VERSION}
    rec.update(record)
    return json.dumps(rec, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# scalar formatting


def format_scalar(x, digits: int | None = None) -> str:
    """Canonical text for a local value.

    Integral quadratic scalars print as "a+b*w" with residues mod p^digits in
    the integral basis (w = sqrt(delta), or (1+sqrt(delta))/2 at split-off
    p = 2 inert); plain scalars print as "u" or "p^v*u".  Exact one prints
    as "1".
    """
    if isinstance(x, QuadScalar):
        if x.is_zero:
            return "0"
        k = x.min_prec()
        if digits is not None:
            k = min(k, digits)
        if k <= 0:
            raise UnsupportedError("no digits left to format")
        try:
            a, b = x.coords_residue(k)
        except ValueError:
            raise UnsupportedError(
                "cannot format a value with non-integral coordinates")
        if b == 0:
            return str(a)
        if a == 0:
            return f"{b}*w"
        return f"{a}+{b}*w"
    if isinstance(x, PadicScalar):
        if x.is_zero:
            return "0"
        k = x.prec if digits is None else min(x.prec, digits)
        if k <= 0:
            raise UnsupportedError("no digits left to format")
        u = x.unit_residue(k)
        if x.v == 0:
            return str(u)
        return f"{x.ctx.p}^{x.v}*{u}"
    raise UnsupportedError(f"cannot format {type(x).__name__}")


# ---------------------------------------------------------------------------
# boundary-measure files


def measure_to_dict(mu: BoundaryMeasure) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": MEASURE_KIND,
        "p": mu.ctx.p,
        "N": mu.ctx.N,
        "depth": mu.maxdepth,
        "total": mu.total,
        "leaves": sorted([ch, c, m] for (ch, c), m in mu.leaves.items()),
    }


def leaves_from_rows(rows) -> Dict[tuple, int]:
    """[[chart, center, mass], ...] -> leaf dict; duplicates are a format error."""
    if not isinstance(rows, list):
        raise MeasureFormatError("leaf-table", "leaves must be a list")
    leaves: Dict[tuple, int] = {}
    for row in rows:
        if (not isinstance(row, list) or len(row) != 3
                or not isinstance(row[0], str)
                or not isinstance(row[1], int) or isinstance(row[1], bool)):
            raise MeasureFormatError(
                "leaf-table", f"leaf row {row!r} is not [chart, center, mass]")
        key = (row[0], row[1])
        if key in leaves:
            raise MeasureFormatError(
                "additivity", f"duplicate leaf {key}: masses would merge")
        leaves[key] = row[2]
    return leaves


def measure_from_dict(doc: dict, N: int | None = None,
                      depth_cap: int | None = None) -> BoundaryMeasure:
    if doc.get("kind") != MEASURE_KIND:
        raise MeasureFormatError(
            "kind", f"expected {MEASURE_KIND!r}, got {doc.get('kind')!r}")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise MeasureFormatError(
            "schema", f"unsupported schema_version {doc.get('schema_version')!r}")
    for field in ("p", "N", "depth", "total", "leaves"):
        if field not in doc:
            raise MeasureFormatError("missing-field", field)
    for field in ("p", "N", "depth", "total"):
        if not isinstance(doc[field], int) or isinstance(doc[field], bool):
            raise MeasureFormatError(
                "integrality", f"field {field!r} must be an integer")
    depth = doc["depth"]
    if depth_cap is not None and depth > depth_cap:
        raise DepthError(
            f"measure depth {depth} exceeds the configured cap {depth_cap}")
    ctx = PrimeContext(doc["p"], N if N is not None else doc["N"])
    leaves = leaves_from_rows(doc["leaves"])
    try:
        mu = BoundaryMeasure(ctx, depth, leaves)
    except ValueError as e:
        raise MeasureFormatError("address", str(e)) from None
    if mu.total != doc["total"]:
        raise MeasureFormatError(
            "additivity",
            f"declared total {doc['total']} but leaves sum to {mu.total}")
    return mu


def load_measure(path: str, N: int | None = None,
                 depth_cap: int | None = None) -> BoundaryMeasure:
    return measure_from_dict(load_document(path), N=N, depth_cap=depth_cap)


def save_measure(mu: BoundaryMeasure, path: str) -> None:
    save_document(measure_to_dict(mu), path)


# ---------------------------------------------------------------------------
# instance files (syntactic layer; semantic validation lives with the model)


def check_instance_sections(doc: dict, source: str = "instance") -> None:
    if doc.get("kind") != INSTANCE_KIND:
        raise InstanceError(
            f"{source}: expected kind {INSTANCE_KIND!r}, got {doc.get('kind')!r}")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise InstanceError(
            f"{source}: unsupported schema_version "
            f"{doc.get('schema_version')!r}")
    for name in INSTANCE_SECTIONS:
        if name not in doc:
            raise InstanceError(f"{source}: missing section {name!r}")
    for name in ("p", "N"):
        if not isinstance(doc.get(name), int) or isinstance(doc.get(name), bool):
            raise InstanceError(f"{source}: field {name!r} must be an integer")


def load_instance_dict(path: str) -> dict:
    doc = load_document(path)
    check_instance_sections(doc, source=path)
    return doc


def save_instance_dict(doc: dict, path: str) -> None:
    check_instance_sections(doc)
    save_document(doc, path)
