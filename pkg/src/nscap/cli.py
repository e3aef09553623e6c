"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 consistency failure, 3 I/O or
missing prerequisite.
"""
import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from nscap.errors import DomainError, FormatError, NscapError, SolverError, StateError

EXIT_OK, EXIT_USAGE, EXIT_CONSISTENCY, EXIT_IO = 0, 1, 2, 3

DEFAULT_TOLS = {
    "scan": 1e-9,   # closed form vs. vertex scan (local, NS)
    "qlb": 1e-9,    # closed form vs. post-processing search
    "qub": 1e-6,    # closed form vs. P_out scan
    "npa": 1e-3,    # NPA values vs. 2 + sqrt 2 and 0
}
RESOURCES = ("local", "ns", "qlb", "qub")
VERTEX_KINDS = ("local", "half", "third", "quarter", "ns-union", "all")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    cache_dir: Path
    grid: tuple = (101, 101)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLS))
    long_tests: bool = False
    output_format: str = "csv"

    def __post_init__(self):
        if min(self.grid) < 2:
            raise UsageError("grid dimensions must be at least 2")
        bad = [k for k, v in self.tolerances.items() if not v > 0]
        if bad:
            raise UsageError(f"tolerances must be positive: {bad}")


# ----------------------------------------------------------------- helpers

def _grid(text):
    try:
        n, m = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 101x101, got {text!r}") from None
    return n, m


def _tol(text):
    name, sep, val = text.partition("=")
    if not sep or name not in DEFAULT_TOLS:
        raise argparse.ArgumentTypeError(
            f"--tol expects NAME=VAL with NAME in {sorted(DEFAULT_TOLS)}, got {text!r}")
    try:
        return name, float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value in {text!r}") from None


def _prob(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError(f"{v} is outside [0, 1]")
    return v


def _level(text):
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}") from None
    if not 2 < v < 4:
        raise argparse.ArgumentTypeError(f"cut level {v} must lie strictly between 2 and 4")
    return v


def _fmt(v):
    return f"{v:.12g}"


def _emit(cfg, records, text=None, out=None):
    """Write records as csv/json (or preformatted text) to ``out`` or stdout."""
    if cfg.output_format == "json":
        payload = json.dumps(records, indent=2) + "\n"
    elif text is not None:
        payload = text
    else:
        cols = list(records[0]) if records else []
        lines = [",".join(cols)]
        for r in records:
            lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v).lower()
                                  if isinstance(v, bool) else str(v) for v in r.values()))
        payload = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(payload)
    else:
        path = Path(out)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
        os.replace(tmp, path)


def _line(*parts):
    print(" ".join(str(p) for p in parts), flush=True)


# ---------------------------------------------------------------- commands

def cmd_vertices(cfg, args):
    from nscap.relabel import ORBIT_KINDS, UNION_KIND, ns_union, orbit
    from nscap.vertexset import checksum

    kinds = ORBIT_KINDS if args.kind == "all" else (args.kind,)
    records = []
    for kind in kinds:
        if kind == UNION_KIND:
            vs, cached = ns_union(cfg.cache_dir), None
        else:
            vs, cached = orbit(kind, cfg.cache_dir)
        records.append({"kind": kind, "count": len(vs), "checksum": checksum(vs),
                        "cached": cached})
    if args.kind == "all":
        union = ns_union(cfg.cache_dir)
        records.append({"kind": UNION_KIND, "count": len(union), "checksum": checksum(union),
                        "cached": None})
    if cfg.output_format == "json":
        _emit(cfg, records)
    else:
        for r in records:
            _line(r["kind"], r["count"], r["checksum"])
    return EXIT_OK


def _cached_or_none(kind, cache_dir):
    from nscap.relabel import cache_path
    from nscap.vertexset import load_vertex_set

    path = cache_path(kind, cache_dir)
    return load_vertex_set(path) if path.exists() else None


def cmd_capacity(cfg, args):
    from nscap import capacity as cap
    from nscap.channel import ChannelParams
    from nscap.quantum import quantum_lb_search
    from nscap.relabel import orbit

    p, q = args.p, args.q
    params = ChannelParams(p, q)
    formula = {"local": cap.local_capacity_formula, "ns": cap.ns_capacity_formula,
               "qlb": cap.qlb_formula, "qub": cap.qub_formula}[args.resource](p, q)
    scan, note, tol = None, "", cfg.tolerances["scan"]
    if args.resource == "local":
        scan = cap.capacity_over_set(orbit("local", cfg.cache_dir)[0], params).value
    elif args.resource == "ns":
        vs = _cached_or_none("ns-union", cfg.cache_dir)
        if vs is None:
            note = "vertex scan skipped: run `nscap vertices all` to build the NS union"
        else:
            scan = cap.capacity_over_set(vs, params).value
    elif args.resource == "qlb":
        scan, tol = quantum_lb_search(params), cfg.tolerances["qlb"]
    else:
        vs = _cached_or_none("pout", cfg.cache_dir)
        tol = cfg.tolerances["qub"]
        if vs is None:
            note = "vertex scan skipped: run `nscap pout` to build P_out"
        else:
            scan = cap.capacity_over_set(vs, params).value
    rec = {"resource": args.resource, "p": p, "q": q, "formula": formula,
           "scan": scan, "difference": None if scan is None else abs(scan - formula)}
    if cfg.output_format == "json":
        _emit(cfg, [rec])
    else:
        _line("formula", _fmt(formula))
        if scan is not None:
            _line("scan", _fmt(scan))
            _line("difference", f"{rec['difference']:.3g}")
        if note:
            _line(note)
    if scan is not None and rec["difference"] > tol:
        return EXIT_CONSISTENCY
    return EXIT_OK


def scan_records(grid):
    from nscap.capacity import hierarchy_arrays, make_grid

    P, Q = make_grid(*grid)
    p, q = P.ravel(), Q.ravel()
    cl, cn, clb, cub, gray = hierarchy_arrays(p, q)
    return [{"p": float(p[i]), "q": float(q[i]), "C_L": float(cl[i]), "C_NS": float(cn[i]),
             "C_QLB": float(clb[i]), "C_QUB": float(cub[i]), "in_gray_region": bool(gray[i])}
            for i in range(len(p))]


def cmd_scan(cfg, args):
    _emit(cfg, scan_records(cfg.grid), out=args.out)
    return EXIT_OK


def cmd_table1(cfg, args):
    from nscap.bell import table1_report
    from nscap.data import comparison_vertex
    from nscap.relabel import cached_set

    sets = {k: cached_set(kind, cfg.cache_dir)
            for k, kind in ((2, "half"), (3, "third"), (4, "quarter"))}
    report = table1_report()
    members = all(comparison_vertex(k) in sets[k] for k in sets)
    if cfg.output_format == "json":
        _emit(cfg, report.to_records())
    elif args.csv:
        sys.stdout.write(report.to_csv())
    else:
        sys.stdout.write(report.to_text())
        _line("comparison vertices in their orbits:", members)
    return EXIT_OK if members else EXIT_CONSISTENCY


def cmd_pout(cfg, args):
    from nscap.capacity import capacity_over_set, make_grid, capacity_grid, qub_formula
    from nscap.data import PAIRS
    from nscap.polytope import build_p_out, cut
    from nscap.relabel import ORBIT_KINDS, cached_set, cache_path
    from nscap.vertexset import save_vertex_set

    orbits = {k: cached_set(k, cfg.cache_dir) for k in ORBIT_KINDS}
    cuts = {}
    _line("cut level", args.level)
    for p in PAIRS:
        res, cached = cut(*p, cache_dir=cfg.cache_dir, level=args.level)
        cuts[p] = res
        _line(f"cut {p[0]}{p[1]}", len(res.new_vertices),
              "(cached)" if cached else f"({res.seconds:.1f} s)",
              "within other cuts:", int(np.count_nonzero(res.others_ok)))
    vs, audit = build_p_out(orbits, cuts, args.level)
    save_vertex_set(vs, cache_path(vs.kind, cfg.cache_dir))
    _line("pout before dedup", audit.size_before_dedup)
    _line("pout size", audit.size)
    at10 = capacity_over_set(vs, (1.0, 0.0)).value
    _line("capacity (1, 0)", _fmt(at10), "formula", _fmt(qub_formula(1.0, 0.0)))
    P, Q = make_grid(51)
    diff = float(np.abs(capacity_grid(vs, P, Q) - qub_formula(P, Q)).max())
    _line("max |scan - formula| on 51x51", f"{diff:.3g}")
    return EXIT_OK if diff <= cfg.tolerances["qub"] else EXIT_CONSISTENCY


def cmd_npa(cfg, args):
    from nscap.data import PAIRS
    from nscap.polytope import special_functional
    from nscap.quantum import npa1_max_functional, npa1_min_functional

    records, ok = [], True
    target = 2 + np.sqrt(2)
    for p in PAIRS:
        L = special_functional(*p)
        hi, lo = npa1_max_functional(L), npa1_min_functional(L)
        ok &= abs(hi - target) <= cfg.tolerances["npa"] and abs(lo) <= cfg.tolerances["npa"]
        records.append({"pair": f"{p[0]}{p[1]}", "max": hi, "min": lo})
    if cfg.output_format == "json":
        _emit(cfg, records)
    else:
        for r in records:
            _line(f"L_{r['pair']}", "max", _fmt(r["max"]), "min", _fmt(r["min"]))
    return EXIT_OK if ok else EXIT_CONSISTENCY


def run_checks(cfg):
    """Internal consistency checks; yields ``(name, ok, detail)``."""
    from nscap import capacity as cap
    from nscap.bell import generate_equivalent_inequalities
    from nscap.data import max_rate_vertices
    from nscap.polytope import (find_max_rate_vertices, ns_h_representation,
                                pair_structure_check, vertex_enumeration)
    from nscap.quantum import quantum_lb_search
    from nscap.relabel import EXPECTED_SIZES, ORBIT_KINDS, ns_union, orbit
    from nscap.vertexset import VertexSet

    orbits = {k: orbit(k, cfg.cache_dir)[0] for k in ORBIT_KINDS}
    for k in ORBIT_KINDS:
        yield f"orbit {k}", len(orbits[k]) == EXPECTED_SIZES[k], len(orbits[k])
    union = ns_union(cfg.cache_dir)
    yield "ns union", len(union) == EXPECTED_SIZES["ns-union"], len(union)
    P, Q = cap.make_grid(51)
    d = float(np.abs(cap.capacity_grid(orbits["local"], P, Q)
                     - cap.local_capacity_formula(P, Q)).max())
    yield "local formula vs scan", d <= cfg.tolerances["scan"], f"{d:.3g}"
    d = float(np.abs(cap.capacity_grid(union, P, Q) - cap.ns_capacity_formula(P, Q)).max())
    yield "ns formula vs scan", d <= cfg.tolerances["scan"], f"{d:.3g}"
    top = find_max_rate_vertices((1.0, 0.0), union)
    yield "max-rate vertices", top == VertexSet.from_behaviors("v", max_rate_vertices()), len(top)
    yield "pair structure", pair_structure_check().ok, ""
    rng = np.random.default_rng(0)
    pts = rng.random((5, 2))
    d = max(abs(quantum_lb_search(tuple(x)) - cap.qlb_formula(*x)) for x in pts)
    yield "quantum lower bound", d <= cfg.tolerances["qlb"], f"{d:.3g}"
    orb = generate_equivalent_inequalities()
    yield "CGLMP orbit local bound", orb.max_local_violation(orbits["local"]) <= 0, len(orb)
    if cfg.long_tests:
        full = vertex_enumeration(ns_h_representation(), "ns-dd")
        yield "full NS enumeration", full == union, len(full)


def cmd_check(cfg, args):
    cfg.long_tests = args.long
    ok = True
    for name, good, detail in run_checks(cfg):
        ok &= bool(good)
        _line("PASS" if good else "FAIL", name, detail)
    return EXIT_OK if ok else EXIT_CONSISTENCY


# ------------------------------------------------------------------ parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand from resetting a flag given before it
    common.add_argument("--cache", metavar="DIR", default=argparse.SUPPRESS,
                        help="vertex-set cache directory (env NSCAP_CACHE)")
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    common.add_argument("--tol", type=_tol, action="append", default=argparse.SUPPRESS,
                        metavar="NAME=VAL")

    parser = argparse.ArgumentParser(prog="nscap", parents=[common],
                                     description="Capacities of an interference channel "
                                                 "under local, quantum and no-signaling coding.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vertices", parents=[common], help="build or load vertex orbits")
    p.add_argument("kind", choices=VERTEX_KINDS)
    p.set_defaults(func=cmd_vertices)

    p = sub.add_parser("capacity", parents=[common], help="one capacity value")
    p.add_argument("resource", choices=RESOURCES)
    p.add_argument("p", type=_prob)
    p.add_argument("q", type=_prob)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("scan", parents=[common], help="capacity hierarchy over a grid")
    p.add_argument("--grid", type=_grid, default=None, metavar="NxM")
    p.add_argument("--out", default=None, metavar="FILE")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("table1", parents=[common], help="nonlocality vs. sum rate table")
    p.add_argument("--csv", action="store_true", help="CSV instead of aligned text")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("pout", parents=[common], help="build the cuts and P_out")
    p.add_argument("--level", type=_level, default=Fraction(7, 2), metavar="C",
                   help="cut level c in L_(i,j) <= c, as a fraction (default 7/2)")
    p.set_defaults(func=cmd_pout)

    p = sub.add_parser("npa", parents=[common], help="level-1 NPA bounds of the functionals")
    p.set_defaults(func=cmd_npa)

    p = sub.add_parser("check", parents=[common], help="internal consistency checks")
    p.add_argument("--long", action="store_true", help="include the full NS enumeration")
    p.set_defaults(func=cmd_check)
    return parser


def make_config(args):
    from nscap.relabel import default_cache_dir

    tols = dict(DEFAULT_TOLS)
    tols.update(dict(getattr(args, "tol", [])))
    cache = getattr(args, "cache", None)
    cache = Path(cache) if cache else default_cache_dir()
    grid = getattr(args, "grid", None) or (101, 101)
    return RunConfig(cache, grid, tols, False, getattr(args, "format", "csv"))


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = make_config(args)
        return args.func(cfg, args)
    except (UsageError, DomainError) as exc:
        print(f"nscap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StateError as exc:
        print(f"nscap: missing prerequisite: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OSError, FormatError) as exc:
        print(f"nscap: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SolverError, NscapError) as exc:
        print(f"nscap: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY


if __name__ == "__main__":
    sys.exit(main())
