"""Command line interface: ``kummer {scan,classgroup,fmcount,construct,verify,sbtable}``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

from . import bqf, pipeline
from .discform import SubgroupOfUnits
from .errors import KummerError, SearchExhausted
from .fmcount import kummer_structure_count
from .lattice import EvenLattice

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT = 2
EXIT_EXHAUSTED = 3


def _cache(args):
    return None if args.no_cache else pipeline.ClassDataCache()


def _dump(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


SCAN_FIELDS = ["n", "D", "p", "q", "h_plus", "genus_sizes", "gl2_per_genus",
               "unit_t", "unit_u", "norm_sign", "sb_ratio"]


def cmd_scan(args) -> int:
    cache = _cache(args)
    records = pipeline.scan_sequence(args.n_max, cache)
    if cache is not None:
        cache.save()
    if args.csv:
        w = csv.writer(sys.stdout)
        w.writerow(SCAN_FIELDS)
        for r in records:
            w.writerow([r.n, r.D, r.p, r.q, r.h_plus,
                        " ".join(map(str, r.genus_sizes)), " ".join(map(str, r.gl2_per_genus)),
                        r.unit.t, r.unit.u, r.unit.norm_sign, f"{r.sb_ratio:.6f}"])
    else:
        _dump([r.to_json() for r in records])
    return EXIT_OK


def cmd_classgroup(args) -> int:
    cg = bqf.class_group(args.disc)
    try:
        genera = bqf.genus_split(cg)
    except KummerError:
        genera = None
    _dump(cg.to_json(genera))
    return EXIT_OK


def _parse_units(text: str, m: int) -> SubgroupOfUnits:
    units = [int(x) for x in text.replace(",", " ").split()]
    return SubgroupOfUnits(m, frozenset(units))


def cmd_fmcount(args) -> int:
    with open(args.gram) as fh:
        lat = EvenLattice.from_json(json.load(fh))
    g = None
    if args.g_units:
        g = _parse_units(args.g_units, abs(lat.det))
    report = kummer_structure_count(lat, g, product_type=args.product_type)
    _dump(report.to_json())
    return EXIT_OK


def cmd_construct(args) -> int:
    try:
        result = pipeline.construct_examples(args.n, args.n_max, _cache(args))
    except SearchExhausted as exc:
        best = exc.best.to_json() if exc.best is not None else None
        print(json.dumps({"error": str(exc), "best": best}, sort_keys=True), file=sys.stderr)
        return EXIT_EXHAUSTED
    _dump(result.to_json(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    with open(args.infile) as fh:
        data = json.load(fh)
    ok, report = pipeline.verify_construction(data)
    _dump(report)
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_sbtable(args) -> int:
    cache = _cache(args)
    records = pipeline.scan_sequence(args.n_max, cache)
    if cache is not None:
        cache.save()
    w = csv.writer(sys.stdout)
    w.writerow(["n", "D", "h_plus", "epsilon", "ratio"])
    for row in pipeline.siegel_brauer_table(records):
        w.writerow([row["n"], row["D"], row["h_plus"], str(row["epsilon"]), f"{row['ratio']:.6f}"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kummer", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--no-cache", action="store_true",
                        help="do not read or write the class-data cache")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="records for D = 4n^2 + 1 = pq, n <= K")
    p.add_argument("--n-max", type=int, required=True)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=True)
    fmt.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("classgroup", help="narrow class group of a fundamental discriminant")
    p.add_argument("--disc", type=int, required=True)
    p.set_defaults(func=cmd_classgroup)

    p = sub.add_parser("fmcount", help="embedding-class count for a Neron-Severi Gram matrix")
    p.add_argument("--gram", required=True, help="JSON array-of-arrays file")
    p.add_argument("--g-units", help="units mod |det| forming the Hodge group image (default ±1)")
    p.add_argument("--product-type", action="store_true",
                   help="rank-4 input: A is a product of elliptic curves")
    p.set_defaults(func=cmd_fmcount)

    p = sub.add_parser("construct", help="N non-isomorphic lattices in one genus")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n-max", type=int, default=pipeline.DEFAULT_N_MAX)
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="recheck a construction file")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sbtable", help="Siegel-Brauer ratio table as CSV")
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=cmd_sbtable)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (KummerError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
