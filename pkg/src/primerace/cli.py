"""Command-line front end.

Subcommands: ``density`` (one ordering), ``table`` (all orderings of a
set, with symmetry and inequality verification), ``symmetries`` (class
listing, no zero data needed), ``empirical`` (sieve race).  Output is a
versioned JSON document (or CSV); every numeric result carries its error
budget, a 7-decimal rendering, and the exact hex float so runs can be
compared bit for bit.  Exit codes: 0 ok, 1 usage, 2 missing data,
3 numerical inconsistency.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .characters import RaceTuple, euler_phi
from .density import (
    GridSpec,
    build_factor_system,
    default_grid,
    density_general,
    density_two_way,
    permutation_table,
)
from .empirical import dump_csv, log_density_estimate, normalized_error, sieve_race
from .errors import (
    MissingConstantError,
    NumericalInconsistencyError,
    PrimeRaceError,
)
from .rigor import assemble_budget
from .symmetry import check_inequalities, isomorphism_classes, symmetry_closure, verify_table_symmetries
from .zerodata import bundled_full_sums, load_tables_for_modulus

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit2(message)


class SystemExit2(Exception):
    def __init__(self, message):
        super().__init__(message)


@dataclass
class RunConfig:
    command: str
    q: int = 0
    residues: tuple = ()
    residue_set: tuple = ()
    r: int = 3
    epsilon: float | None = None
    C: float | None = None
    T: float | None = None
    zeros_dir: str | None = None
    format: str = "json"
    threads: int = 1
    tolerance: float = 1e-10
    full_sums: dict = field(default_factory=dict)
    X: int = 1000000
    condition: str = ""
    dump: bool = False


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
    except ValueError:
        raise SystemExit2(f"expected comma-separated integers, got {text!r}")


def _parse_full_sum(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise SystemExit2(f"--full-sum expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise SystemExit2(f"bad --full-sum value {v!r}")
    return out


def _load_config_file(path: str) -> dict:
    """Minimal key=value config (TOML-style scalars, no sections)."""
    data = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit2(f"bad config line {raw!r}")
        k, v = (s.strip() for s in line.split("=", 1))
        data[k] = v.strip("\"'")
    return data


def build_parser() -> _Parser:
    p = _Parser(prog="primerace", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_grid=True):
        sp.add_argument("--q", type=int, required=True)
        sp.add_argument("--zeros-dir", default=None)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--tolerance", type=float, default=1e-10)
        sp.add_argument("--full-sum", action="append", metavar="KEY=VALUE")
        sp.add_argument("--config", default=None)
        if need_grid:
            sp.add_argument("--epsilon", type=float, default=None)
            sp.add_argument("--C", type=float, default=None)
            sp.add_argument("--T", type=float, default=None)

    d = sub.add_parser("density", help="one ordering's density with its budget")
    common(d)
    d.add_argument("--residues", required=True)

    t = sub.add_parser("table", help="full permutation table of a residue set")
    common(t)
    t.add_argument("--set", dest="residue_set", required=True)

    s = sub.add_parser("symmetries", help="symmetry classes (no zero data)")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--r", type=int, default=3)
    s.add_argument("--format", choices=("json", "csv"), default="json")

    e = sub.add_parser("empirical", help="sieve race and density estimates")
    e.add_argument("--q", type=int, required=True)
    e.add_argument("--X", type=int, default=1000000)
    e.add_argument("--condition", default="")
    e.add_argument("--dump", action="store_true")
    e.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def _float_fields(x: float) -> dict:
    return {"value": x, "repr7": f"{x:.7f}", "hex": float(x).hex()}


def _grid_for(args, r: int) -> GridSpec:
    base = default_grid(r)
    eps = args.epsilon if args.epsilon is not None else base.epsilon
    C = args.C if args.C is not None else base.C
    T = args.T
    return eps, C, T


def _auto_T(T, tables):
    if T is not None:
        return float(T)
    return min(10000.0, min(zt.height for zt in tables.values()))


def _emit(doc: dict, fmt: str):
    if fmt == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        rows = doc.get("results", [])
        if rows:
            cols = sorted(rows[0].keys())
            print(",".join(cols))
            for row in rows:
                print(",".join(str(row.get(c, "")) for c in cols))


def _density_result(q, perm, est, budget):
    out = {"q": q, "tuple": list(perm)}
    out.update(_float_fields(est.value))
    out["exact"] = est.exact
    out["clamped"] = est.clamped
    if budget is not None:
        out["budget"] = budget.as_dict()
        out["certified"] = budget.certified
    else:
        out["budget"] = None
        out["certified"] = est.exact
    return out


def _apply_config_file(args):
    if getattr(args, "config", None):
        file_cfg = _load_config_file(args.config)
        for key, val in file_cfg.items():
            attr = key.replace("-", "_")
            if not hasattr(args, attr) or getattr(args, attr) in (None, [], ()):
                try:
                    setattr(args, attr, type_convert(val))
                except Exception:
                    setattr(args, attr, val)


def type_convert(v: str):
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            continue
    return v


def cmd_density(args) -> int:
    overrides = {**bundled_full_sums(), **_parse_full_sum(args.full_sum)}
    residues = _parse_int_list(args.residues)
    tup = RaceTuple(args.q, residues)
    tables = load_tables_for_modulus(args.q, args.zeros_dir)
    eps, C, T = _grid_for(args, tup.r)
    grid = GridSpec(epsilon=eps, C=C, T=_auto_T(T, tables))
    system = build_factor_system(args.q, grid, r_max=tup.r, tables=tables,
                                 full_sum_overrides=overrides)
    if tup.r == 2:
        est = density_two_way(tup, grid, system, threads=args.threads)
    else:
        est = density_general(tup, grid, system, threads=args.threads)
    budget = None
    if not est.exact:
        full_sums = {zt.character_key: _resolve_sum(zt, overrides) for zt in tables.values()}
        budget = assemble_budget(tup, grid, system, tables, full_sums)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "density",
        "config": {"q": args.q, "residues": list(residues), "epsilon": grid.epsilon,
                   "C": grid.C, "T": grid.T, "threads": args.threads},
        "results": [_density_result(args.q, residues, est, budget)],
    }
    _emit(doc, args.format)
    return EXIT_OK


def _resolve_sum(zt, overrides):
    from .zerodata import full_reciprocal_sum
    return full_reciprocal_sum(zt.character_key, overrides=overrides)


def cmd_table(args) -> int:
    overrides = {**bundled_full_sums(), **_parse_full_sum(args.full_sum)}
    rset = _parse_int_list(args.residue_set)
    r = len(rset)
    if not 2 <= r <= euler_phi(args.q):
        raise SystemExit2(f"set size must be in [2, phi(q)]")
    tables = load_tables_for_modulus(args.q, args.zeros_dir)
    eps, C, T = _grid_for(args, r)
    grid = GridSpec(epsilon=eps, C=C, T=_auto_T(T, tables))
    system = build_factor_system(args.q, grid, r_max=r, tables=tables,
                                 full_sum_overrides=overrides)
    table = permutation_table(args.q, rset, grid, system, threads=args.threads)
    full_sums = {zt.character_key: _resolve_sum(zt, overrides) for zt in tables.values()}

    results = []
    float_table = {}
    for perm in sorted(table):
        est = table[perm]
        budget = None if est.exact else assemble_budget(
            est.tuple, grid, system, tables, full_sums)
        results.append(_density_result(args.q, perm, est, budget))
        float_table[perm] = est.value

    classes = symmetry_closure(args.q, r)
    relevant = [c for c in classes if all(m in float_table for m in c.members)]
    sym = verify_table_symmetries(float_table, relevant, tol=args.tolerance)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "table",
        "config": {"q": args.q, "set": sorted(rset), "epsilon": grid.epsilon,
                   "C": grid.C, "T": grid.T, "threads": args.threads},
        "results": results,
        "total": _float_fields(sum(float_table.values())),
        "symmetry_check": {
            "classes_checked": sym.checked_classes,
            "max_deviation": sym.max_deviation,
            "passed": sym.passed,
        },
    }
    _emit(doc, args.format)
    return EXIT_OK


def cmd_symmetries(args) -> int:
    classes = symmetry_closure(args.q, args.r)
    iso = isomorphism_classes(args.q, args.r)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "symmetries",
        "config": {"q": args.q, "r": args.r},
        "results": [
            {
                "representative": list(c.representative),
                "size": len(c.members),
                "members": sorted(list(m) for m in c.members),
                "generators": list(c.generators),
            }
            for c in classes
        ],
        "distinct_densities": len(classes),
        "isomorphism_classes": [
            sorted(sorted(s) for s in grp) for grp in iso
        ],
    }
    _emit(doc, args.format)
    return EXIT_OK


def cmd_empirical(args) -> int:
    trace = sieve_race(args.q, args.X)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "empirical",
        "config": {"q": args.q, "X": args.X, "condition": args.condition},
        "results": [],
    }
    if args.condition:
        try:
            order = tuple(int(s) for s in args.condition.split(">"))
        except ValueError:
            raise SystemExit2(f"bad condition {args.condition!r}; expected e.g. '3>1'")
        if len(order) < 2:
            raise SystemExit2("condition needs at least two residues, e.g. '3>1'")
        est = log_density_estimate(trace, order)
        doc["results"].append({"condition": args.condition,
                               **_float_fields(est)})
    if args.dump:
        dump_csv(trace, sys.stdout)
        return EXIT_OK
    x = float(trace.X)
    doc["counts_at_X"] = trace.counts_at(x)
    doc["E_at_X"] = {a: normalized_error(trace, a, x)
                     for a in trace.residue_classes}
    _emit(doc, args.format)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config_file(args)
        handler = {
            "density": cmd_density,
            "table": cmd_table,
            "symmetries": cmd_symmetries,
            "empirical": cmd_empirical,
        }[args.command]
        return handler(args)
    except SystemExit2 as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, MissingConstantError) as exc:
        print(f"data error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalInconsistencyError as exc:
        print(f"numerical error (density): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PrimeRaceError as exc:
        print(f"data error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
