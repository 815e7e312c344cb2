"""Canonical JSON and CSV forms of lattices, maps, quantales, witnesses and reports.

Every ``*_to_dict`` result is plain JSON data with sorted lists, and
:func:`dumps` writes it with sorted keys and compact separators, so two equal
values always serialize to the same bytes. ``*_from_dict`` raise
:class:`SchemaError` naming the offending JSON path.
"""
from __future__ import annotations

import csv
import io
import json

import numpy as np

from frobenius_lab.core.errors import LabError, NotAPartialOrder, SchemaError
from frobenius_lab.core.lattice import covers, from_covers
from frobenius_lab.core.quantale import (
    CheckResult,
    FrobeniusReport,
    FrobeniusWitness,
    LawReport,
    Quantale,
    WitnessOrigin,
    make_quantale,
)
from frobenius_lab.core.rel import RelWitness, TernaryRel
from frobenius_lab.core.slatt import HomLattice, SupMap, TensorElement
from frobenius_lab.core.theorems import SweepRow, TightQuantale


def dumps(data):
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("$", f"malformed JSON: {e.msg} at line {e.lineno} column {e.colno}") from None


# --- field helpers ---------------------------------------------------------------

def _field(data, key, path, kind, optional=False):
    if not isinstance(data, dict):
        raise SchemaError(path, "expected an object")
    if key not in data or data[key] is None:
        if optional:
            return None
        raise SchemaError(f"{path}.{key}", "missing field")
    value = data[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise SchemaError(f"{path}.{key}", f"expected an integer, got {value!r}")
    if kind is not int and not isinstance(value, kind):
        raise SchemaError(f"{path}.{key}", f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _int_list(values, path, length=None, bound=None):
    if not isinstance(values, list):
        raise SchemaError(path, "expected a list")
    if length is not None and len(values) != length:
        raise SchemaError(path, f"expected {length} entries, got {len(values)}")
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, int):
            raise SchemaError(f"{path}[{i}]", f"expected an integer, got {v!r}")
        if bound is not None and not 0 <= v < bound:
            raise SchemaError(f"{path}[{i}]", f"index {v} out of range 0..{bound - 1}")
    return values


def _int_matrix(rows, path, shape, bound):
    if not isinstance(rows, list) or len(rows) != shape[0]:
        raise SchemaError(path, f"expected {shape[0]} rows")
    for i, row in enumerate(rows):
        _int_list(row, f"{path}[{i}]", length=shape[1], bound=bound)
    return rows


# --- lattices and maps -----------------------------------------------------------

def lattice_to_dict(lattice):
    data = {"size": lattice.size, "covers": [list(c) for c in covers(lattice)]}
    if lattice.name is not None:
        data["name"] = lattice.name
    return data


def lattice_from_dict(data, path="$"):
    size = _field(data, "size", path, int)
    if size < 1:
        raise SchemaError(f"{path}.size", "size must be positive")
    name = _field(data, "name", path, str, optional=True)
    pairs = _field(data, "covers", path, list)
    for i, pair in enumerate(pairs):
        _int_list(pair, f"{path}.covers[{i}]", length=2, bound=size)
    try:
        return from_covers(size, [tuple(p) for p in pairs], name=name)
    except NotAPartialOrder as e:
        raise SchemaError(f"{path}.covers", str(e)) from None


def supmap_to_dict(f):
    return {"source": lattice_to_dict(f.source), "target": lattice_to_dict(f.target), "values": list(f.values)}


def supmap_from_dict(data, path="$"):
    source = lattice_from_dict(_field(data, "source", path, dict), f"{path}.source")
    target = lattice_from_dict(_field(data, "target", path, dict), f"{path}.target")
    values = _int_list(_field(data, "values", path, list), f"{path}.values", length=source.size, bound=target.size)
    return SupMap(source, target, tuple(values))


def tensor_element_to_list(element):
    return [list(p) for p in element.pairs]


def tensor_element_from_list(tensor, pairs, path="$"):
    """Rebuilds an element of ``tensor``; the pairs must already form a bi-ideal."""
    if not isinstance(pairs, list):
        raise SchemaError(path, "expected a list of pairs")
    bits = 0
    for i, pair in enumerate(pairs):
        _int_list(pair, f"{path}[{i}]", length=2)
        x, y = pair
        if not (0 <= x < tensor.left.size and 0 <= y < tensor.right.size):
            raise SchemaError(f"{path}[{i}]", f"pair {pair} out of range")
        bits |= 1 << (x * tensor.right.size + y)
    if tensor.closure(bits) != bits:
        raise SchemaError(path, "pairs are not a bi-ideal")
    return TensorElement(bits, tensor.left.size, tensor.right.size)


# --- quantales, witnesses, reports -----------------------------------------------

def quantale_to_dict(quantale):
    data = {"lattice": lattice_to_dict(quantale.carrier), "mult": quantale.mult.tolist()}
    if quantale.unit is not None:
        data["unit"] = quantale.unit
    return data


def quantale_from_dict(data, path="$"):
    """Rebuilds and re-validates a quantale; the unit is detected again and must match."""
    carrier = lattice_from_dict(_field(data, "lattice", path, dict), f"{path}.lattice")
    n = carrier.size
    mult = _int_matrix(_field(data, "mult", path, list), f"{path}.mult", (n, n), n)
    unit = _field(data, "unit", path, int, optional=True)
    try:
        quantale = make_quantale(carrier, mult)
    except LabError as e:
        raise SchemaError(f"{path}.mult", str(e)) from None
    if quantale.unit != unit:
        raise SchemaError(f"{path}.unit", f"declared unit {unit} but the table has unit {quantale.unit}")
    return quantale


def witness_to_dict(witness):
    data = {"l": list(witness.l), "r": list(witness.r), "origin": witness.origin.value}
    if witness.dualizer is not None:
        data["dualizer"] = witness.dualizer
    return data


def witness_from_dict(data, path="$"):
    l = _int_list(_field(data, "l", path, list), f"{path}.l")
    r = _int_list(_field(data, "r", path, list), f"{path}.r", length=len(l))
    origin = _field(data, "origin", path, str)
    try:
        origin = WitnessOrigin(origin)
    except ValueError:
        raise SchemaError(f"{path}.origin", f"unknown origin {origin!r}") from None
    return FrobeniusWitness(tuple(l), tuple(r), origin, _field(data, "dualizer", path, int, optional=True))


def report_to_dict(report):
    data = {"all_passed": report.all_passed, "checks": [
        {"name": c.name, "passed": c.passed,
         "counterexample": None if c.counterexample is None else list(c.counterexample)}
        for c in report.checks
    ]}
    if isinstance(report, FrobeniusReport):
        data["l"], data["r"] = list(report.l), list(report.r)
    return data


def report_from_dict(data, path="$"):
    entries = _field(data, "checks", path, list)
    checks = []
    for i, entry in enumerate(entries):
        where = f"{path}.checks[{i}]"
        counterexample = _field(entry, "counterexample", where, list, optional=True)
        checks.append(CheckResult(
            _field(entry, "name", where, str),
            _field(entry, "passed", where, bool),
            None if counterexample is None else tuple(_int_list(counterexample, f"{where}.counterexample")),
        ))
    if "l" in data:
        return FrobeniusReport(tuple(checks), l=tuple(_int_list(data["l"], f"{path}.l")),
                               r=tuple(_int_list(_field(data, "r", path, list), f"{path}.r")))
    return LawReport(tuple(checks))


def tight_quantale_to_dict(tight):
    data = {
        "lattice": lattice_to_dict(tight.base),
        "maps": tight.maps.values.tolist(),
        "mult": tight.quantale.mult.tolist(),
        "pairing": tight.pairing.astype(int).tolist(),
    }
    if tight.quantale.unit is not None:
        data["unit"] = tight.quantale.unit
    if tight.negation is not None:
        data["negation"] = witness_to_dict(tight.negation)
        data["report"] = report_to_dict(tight.report)
        data["negation_well_defined"] = tight.negation_well_defined
    return data


def tight_quantale_from_dict(data, path="$"):
    base = lattice_from_dict(_field(data, "lattice", path, dict), f"{path}.lattice")
    rows = _field(data, "maps", path, list)
    for i, row in enumerate(rows):
        _int_list(row, f"{path}.maps[{i}]", length=base.size, bound=base.size)
    maps = HomLattice(base, base, [tuple(row) for row in rows], name=f"tight({base.name})")
    if maps.values.tolist() != rows:
        raise SchemaError(f"{path}.maps", "maps must be sorted and distinct")
    m = len(maps)
    mult = _int_matrix(_field(data, "mult", path, list), f"{path}.mult", (m, m), m)
    pairing = _int_matrix(_field(data, "pairing", path, list), f"{path}.pairing", (m, m), 2)
    unit = _field(data, "unit", path, int, optional=True)
    quantale = Quantale(maps.lattice, mult, unit=unit, name=f"Tight({base.name})")
    tight = TightQuantale(base, maps, quantale, np.array(pairing, dtype=bool))
    if "negation" in data:
        tight = TightQuantale(
            base, maps, quantale, tight.pairing,
            negation=witness_from_dict(data["negation"], f"{path}.negation"),
            report=report_from_dict(_field(data, "report", path, dict), f"{path}.report"),
            negation_well_defined=_field(data, "negation_well_defined", path, bool),
        )
    return tight


# --- relations -------------------------------------------------------------------

def relation_to_dict(rel):
    return {"size": rel.size, "triples": [list(t) for t in sorted(rel.triples)]}


def relation_from_dict(data, path="$"):
    size = _field(data, "size", path, int)
    if size < 1:
        raise SchemaError(f"{path}.size", "size must be positive")
    triples = _field(data, "triples", path, list)
    for i, t in enumerate(triples):
        _int_list(t, f"{path}.triples[{i}]", length=3, bound=size)
    return TernaryRel(size, frozenset(tuple(t) for t in triples))


def rel_witness_to_dict(witness):
    return {"l": list(witness.l)}


def rel_witness_from_dict(data, path="$"):
    l = _int_list(_field(data, "l", path, list), f"{path}.l", bound=None)
    if sorted(l) != list(range(len(l))):
        raise SchemaError(f"{path}.l", "l must be a permutation")
    r = [0] * len(l)
    for x, v in enumerate(l):
        r[v] = x
    return RelWitness(tuple(l), tuple(r))


# --- sweep output ----------------------------------------------------------------

def sweep_rows_to_list(rows):
    return [row.as_dict() for row in rows]


def sweep_rows_from_list(data, path="$"):
    if not isinstance(data, list):
        raise SchemaError(path, "expected a list of rows")
    columns = SweepRow.columns()
    rows = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict) or set(entry) != set(columns):
            raise SchemaError(f"{path}[{i}]", f"expected exactly the columns {columns}")
        rows.append(SweepRow(**entry))
    return rows


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def sweep_rows_to_csv(rows):
    """CSV text with one header line and one line per row; booleans as ``true``/``false``."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    columns = SweepRow.columns()
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(getattr(row, c)) for c in columns])
    return buffer.getvalue()
