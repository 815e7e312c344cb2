"""Command-line front end.

Every verb builds a JSON-ready report and a human-readable table; ``--json``
selects the former. Reports go to stdout (or ``--out``), diagnostics and logs
to stderr. Exit codes: 0 success, 1 invariant violation, 2 input error,
3 resource limit.
"""
import argparse
import json
import logging
import sys
from typing import NamedTuple

from frobenius_lab import __version__
from frobenius_lab.core.config_manager import (
    get_cache_capacity_from_config,
    get_limits_from_config,
    get_log_dir_from_config,
    get_log_level_from_config,
    get_workers_from_config,
    read_app_config,
)
from frobenius_lab.core.cache import structure_cache
from frobenius_lab.core.errors import InvalidParameter, LabError, SchemaError
from frobenius_lab.core.lattice import (
    canonical_code,
    enumerate_lattices,
    is_completely_distributive,
    is_distributive,
    join_irreducibles,
    parse_family,
    to_dot,
)
from frobenius_lab.core.log_manager import get_logger, setup_logging
from frobenius_lab.core.quantale import (
    check_action_laws,
    dualizing_elements,
    endo_quantale,
    search_frobenius,
    verify_frobenius,
)
from frobenius_lab.core.rel import (
    is_associative_rel,
    random_semigroup_relation,
    search_rel_frobenius,
    verify_rel_frobenius,
)
from frobenius_lab.core.serialization import (
    dumps,
    lattice_from_dict,
    lattice_to_dict,
    loads,
    quantale_from_dict,
    quantale_to_dict,
    rel_witness_to_dict,
    relation_from_dict,
    relation_to_dict,
    report_to_dict,
    sweep_rows_to_csv,
    sweep_rows_to_list,
    tight_quantale_to_dict,
    witness_to_dict,
)
from frobenius_lab.core.slatt import adjunction_unit, hom_lattice, is_nuclear
from frobenius_lab.core.sweep import theorem_sweep
from frobenius_lab.core.theorems import EQUIVALENT_COLUMNS, pseudo_affine_witness, tight_frobenius

logger = get_logger("frobenius_lab.cli")

VERBS = ("lat-check", "lat-gen", "lat-enum", "quantale-endo", "quantale-tight", "frobenius-search", "rel-search", "sweep")


class Outcome(NamedTuple):
    report: dict
    text: str
    status: int = 0


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


class LabArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as :class:`InvalidParameter` instead of exiting."""

    def error(self, message):
        raise InvalidParameter(f"{self.prog}: {message}")


def build_parser():
    common = LabArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the report as canonical JSON")
    common.add_argument("--out", metavar="PATH", help="write the report to PATH instead of stdout")
    common.add_argument("--config", metavar="PATH", help="app config file (default: app_config.json)")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="override the configured log level")
    common.add_argument("--cap-hom", type=_positive_int, metavar="N", help="maximum maps in a hom or tensor lattice")
    common.add_argument("--cap-search", type=_positive_int, metavar="N", help="maximum carrier for unitless Frobenius search")

    parser = LabArgumentParser(prog="frobenius-lab", description="Finite verification of Frobenius structures.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbs = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    def verb(name, help_text, input_help=None):
        sub = verbs.add_parser(name, parents=[common], help=help_text, description=help_text)
        if input_help is not None:
            sub.add_argument("input", nargs="?", help=input_help)
        return sub

    sub = verb("lat-check", "Check distributivity, nuclearity and adjunction of a lattice.", "lattice JSON file")
    sub.add_argument("--family", metavar="NAME[:ARGS]", help="named lattice, e.g. chain:3 or product(chain(2),m3)")

    sub = verb("lat-gen", "Emit a named lattice as JSON or DOT.")
    sub.add_argument("--family", metavar="NAME[:ARGS]", required=True)
    sub.add_argument("--dot", action="store_true", help="emit the Hasse diagram in DOT")

    sub = verb("lat-enum", "Enumerate lattices up to isomorphism.")
    sub.add_argument("--max-size", type=_positive_int, required=True, metavar="N")

    sub = verb("quantale-endo", "Build the quantale of sup-endomaps and report its dualizing elements.", "lattice JSON file")
    sub.add_argument("--family", metavar="NAME[:ARGS]")

    sub = verb("quantale-tight", "Build the tight-map quantale with its negation and verify it.", "lattice JSON file")
    sub.add_argument("--family", metavar="NAME[:ARGS]")

    sub = verb("frobenius-search", "Search Frobenius witnesses of a quantale.", "quantale JSON file")
    sub.add_argument("--family", metavar="NAME[:ARGS]", help="search the endomap quantale of this lattice")

    sub = verb("rel-search", "Search Frobenius witnesses of a ternary relation.", "relation JSON file")
    sub.add_argument("--seed", type=int, default=0, help="seed for a generated instance when no file is given")
    sub.add_argument("--size", type=_positive_int, default=2, metavar="N", help="universe of a generated instance")
    sub.add_argument("--rel-family", metavar="NAME", help="semigroup family of a generated instance")

    sub = verb("sweep", "Run the theorem sweep over all lattices up to a size.")
    sub.add_argument("--max-size", type=_positive_int, required=True, metavar="N")
    sub.add_argument("--csv", metavar="PATH", help="also write the rows as CSV")
    sub.add_argument("--workers", type=_positive_int, metavar="N", help="worker processes (default from config)")
    sub.add_argument("--cap-sweep", type=_positive_int, metavar="N", help="largest size the sweep accepts")
    return parser


# --- inputs ----------------------------------------------------------------------

def _read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise InvalidParameter(f"cannot read {path}: {e.strerror}") from None
    return loads(text)


def _load_lattice(args, limits):
    if args.input and args.family:
        raise InvalidParameter("give either an input file or --family, not both")
    if args.input:
        return lattice_from_dict(_read_json(args.input))
    if args.family:
        return parse_family(args.family, limits)
    raise InvalidParameter(f"{args.verb} needs an input file or --family")


def _yes(flag):
    return "yes" if flag else "no"


# --- verbs -----------------------------------------------------------------------

def _lat_check(args, limits):
    lattice = _load_lattice(args, limits)
    unit = adjunction_unit(lattice, limits)
    report = {
        "lattice": lattice_to_dict(lattice),
        "size": lattice.size,
        "join_irreducibles": list(join_irreducibles(lattice)),
        "distributive": is_distributive(lattice),
        "completely_distributive": is_completely_distributive(lattice, limits),
        "nuclear": is_nuclear(lattice, limits),
        "adjunction_unit": None if unit is None else [list(p) for p in unit.pairs],
        "pseudo_affine": pseudo_affine_witness(lattice) is not None,
    }
    text = "\n".join([
        f"lattice                  {lattice.name or 'unnamed'} ({lattice.size} elements)",
        f"join irreducibles        {report['join_irreducibles']}",
        f"distributive             {_yes(report['distributive'])}",
        f"completely distributive  {_yes(report['completely_distributive'])}",
        f"nuclear                  {_yes(report['nuclear'])}",
        f"adjunction unit          {_yes(unit is not None)}",
        f"pseudo-affine            {_yes(report['pseudo_affine'])}",
    ]) + "\n"
    return Outcome(report, text)


def _lat_gen(args, limits):
    lattice = parse_family(args.family, limits)
    report = lattice_to_dict(lattice)
    if args.dot:
        return Outcome(report, to_dot(lattice))
    return Outcome(report, dumps(report) + "\n")


def _lat_enum(args, limits):
    lattices = list(enumerate_lattices(args.max_size, limits))
    counts = {}
    for lattice in lattices:
        counts[lattice.size] = counts.get(lattice.size, 0) + 1
    entries = [
        {"name": lattice.name, "size": lattice.size, "code": canonical_code(lattice, limits).hex(),
         "covers": lattice_to_dict(lattice)["covers"]}
        for lattice in lattices
    ]
    report = {"max_size": args.max_size, "counts": {str(k): v for k, v in counts.items()}, "lattices": entries}
    lines = [f"{'size':>4}  {'name':<12} covers"]
    lines += [f"{e['size']:>4}  {e['name']:<12} {e['covers']}" for e in entries]
    lines.append("counts: " + ", ".join(f"{k}:{v}" for k, v in counts.items()))
    return Outcome(report, "\n".join(lines) + "\n")


def _quantale_endo(args, limits):
    lattice = _load_lattice(args, limits)
    quantale = endo_quantale(lattice, limits)
    dualizing = dualizing_elements(quantale)
    laws = check_action_laws(quantale)
    report = {
        "lattice": lattice_to_dict(lattice),
        "quantale": quantale_to_dict(quantale),
        "dualizing": [{"element": d.element, "cyclic": d.cyclic} for d in dualizing],
        "action_laws": report_to_dict(laws),
    }
    maps = hom_lattice(lattice, lattice, limits)
    lines = [
        f"endomaps of {lattice.name or 'unnamed'}: {quantale.size}, unit = map {quantale.unit}",
        f"dualizing elements: {len(dualizing)}",
    ]
    lines += [f"  {list(maps[d.element].values)}{' (cyclic)' if d.cyclic else ''}" for d in dualizing]
    lines.append(f"action laws: {'all pass' if laws.all_passed else 'FAILED ' + ', '.join(laws.failed())}")
    return Outcome(report, "\n".join(lines) + "\n", 0 if laws.all_passed else 1)


def _quantale_tight(args, limits):
    lattice = _load_lattice(args, limits)
    tight = tight_frobenius(lattice, limits)
    report = tight_quantale_to_dict(tight)
    ok = tight.report.all_passed and tight.negation_well_defined
    lines = [
        f"tight maps of {lattice.name or 'unnamed'}: {len(tight)}, unital: {_yes(tight.quantale.unit is not None)}",
        f"negation: {list(tight.negation.l)}",
    ]
    lines += [f"  {c.name:<22} {'pass' if c.passed else 'FAIL ' + str(c.counterexample)}" for c in tight.report.checks]
    lines.append(f"negation well defined: {_yes(tight.negation_well_defined)}")
    return Outcome(report, "\n".join(lines) + "\n", 0 if ok else 1)


def _frobenius_search(args, limits):
    if args.input and args.family:
        raise InvalidParameter("give either an input file or --family, not both")
    if args.input:
        quantale = quantale_from_dict(_read_json(args.input))
    elif args.family:
        quantale = endo_quantale(parse_family(args.family, limits), limits)
    else:
        raise InvalidParameter("frobenius-search needs an input file or --family")
    witnesses = search_frobenius(quantale, limits)
    reports = [verify_frobenius(quantale, w.l, w.r) for w in witnesses]
    report = {
        "quantale": quantale_to_dict(quantale),
        "witnesses": [witness_to_dict(w) for w in witnesses],
        "reports": [report_to_dict(r) for r in reports],
    }
    lines = [f"quantale {quantale.name}: {quantale.size} elements, unit {quantale.unit}",
             f"witnesses: {len(witnesses)}"]
    lines += [f"  l={list(w.l)} r={list(w.r)} {w.origin.value}{' cyclic' if w.cyclic else ''}" for w in witnesses]
    status = 0 if all(r.all_passed for r in reports) else 1
    return Outcome(report, "\n".join(lines) + "\n", status)


def _rel_search(args, limits):
    instance = None
    if args.input:
        rel = relation_from_dict(_read_json(args.input))
    else:
        generated = random_semigroup_relation(args.size, args.seed, args.rel_family)
        rel = generated.rel
        instance = {"family": generated.family, "seed": generated.seed, "relabeling": list(generated.relabeling)}
    associative = is_associative_rel(rel)
    witnesses = search_rel_frobenius(rel, limits) if associative else []
    status = 0 if all(verify_rel_frobenius(rel, w.l, w.r).all_passed for w in witnesses) else 1
    report = {
        "relation": relation_to_dict(rel),
        "associative": associative,
        "witnesses": [rel_witness_to_dict(w) for w in witnesses],
    }
    if instance is not None:
        report["instance"] = instance
    lines = []
    if instance is not None:
        lines.append(f"generated {instance['family']} semigroup, seed {instance['seed']}, relabeling {instance['relabeling']}")
    lines.append(f"relation on {rel.size} points, {len(rel)} triples, associative: {_yes(associative)}")
    lines.append(f"witnesses: {len(witnesses)}")
    lines += [f"  l={list(w.l)}" for w in witnesses]
    return Outcome(report, "\n".join(lines) + "\n", status)


def _sweep(args, limits, workers):
    result = theorem_sweep(args.max_size, limits, workers=workers)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as f:
            f.write(sweep_rows_to_csv(result.rows))
    report = {
        "max_size": args.max_size,
        "rows": sweep_rows_to_list(result.rows),
        "violations": [row.name for row in result.violations],
    }
    columns = ("name", "size") + EQUIVALENT_COLUMNS + ("tight_frobenius_ok", "pseudo_affine")
    short = {"completely_distributive": "compl_distrib", "endo_frobenius_found": "endo_frob",
             "adjunction_unit_found": "adjunction", "tight_frobenius_ok": "tight_ok", "pseudo_affine": "pseudo_aff"}
    header = [short.get(c, c) for c in columns]
    widths = [max(len(h), 8) for h in header]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    for row in result.rows:
        cells = []
        for c in columns:
            value = getattr(row, c)
            cells.append("-" if value is None else (_yes(value) if isinstance(value, bool) else str(value)))
        line = "  ".join(cell.ljust(w) for cell, w in zip(cells, widths)).rstrip()
        if row.error:
            line += f"  [{row.error}]"
        lines.append(line)
    lines.append(f"{len(result.rows)} rows, {len(result.violations)} violations")
    return Outcome(report, "\n".join(lines) + "\n", 0 if result.ok else 1)


HANDLERS = {
    "lat-check": _lat_check,
    "lat-gen": _lat_gen,
    "lat-enum": _lat_enum,
    "quantale-endo": _quantale_endo,
    "quantale-tight": _quantale_tight,
    "frobenius-search": _frobenius_search,
    "rel-search": _rel_search,
}


# --- entry points ----------------------------------------------------------------

def _emit_error(error, as_json, stderr):
    if as_json:
        payload = {"error": type(error).__name__, "message": str(error), "exit_code": error.exit_code}
        if isinstance(error, SchemaError):
            payload["path"] = error.path
        stderr.write(dumps(payload) + "\n")
    else:
        stderr.write(f"error: {type(error).__name__}: {error}\n")


def run(argv=None, stdout=None, stderr=None):
    """Runs one command and returns its exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InvalidParameter as e:
        _emit_error(e, "--json" in argv, stderr)
        return e.exit_code
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2

    try:
        config = read_app_config(args.config)
        log_level = getattr(logging, args.log_level) if args.log_level else get_log_level_from_config(config)
        log_dir = get_log_dir_from_config(config)
    except (OSError, json.JSONDecodeError) as e:
        _emit_error(InvalidParameter(f"cannot read config: {e}"), args.json, stderr)
        return 2
    except LabError as e:
        _emit_error(e, args.json, stderr)
        return e.exit_code
    setup_logging(log_dir=log_dir, log_level=log_level)

    try:
        limits = get_limits_from_config(config).override(
            hom_cap=args.cap_hom,
            search_cap=args.cap_search,
            sweep_max_size=getattr(args, "cap_sweep", None),
        )
        structure_cache.resize(get_cache_capacity_from_config(config, default=structure_cache.capacity))
        if args.verb == "sweep":
            workers = args.workers or get_workers_from_config(config)
            outcome = _sweep(args, limits, workers)
        else:
            outcome = HANDLERS[args.verb](args, limits)
    except LabError as e:
        logger.debug(f"{args.verb} failed: {e}")
        _emit_error(e, args.json, stderr)
        return e.exit_code
    except OSError as e:
        _emit_error(InvalidParameter(str(e)), args.json, stderr)
        return 2

    text = dumps(outcome.report) + "\n" if args.json else outcome.text
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        stdout.write(text)
    return outcome.status


def main():
    return run()
