"""Command line interface.

Subcommands:
  prototypes  enumerate splitting prototypes of a discriminant (TSV)
  surface     build a model surface, report its validation summary, save it
  decompose   cylinder decomposition of a surface in one direction
  hlk         torsion types and the counting invariant of a model surface
  verify      run the theorem verification over a discriminant range
"""

import argparse
import json
import sys
from fractions import Fraction

from .cylinders import decompose, twist_exponents, twist_permutation
from .harness import verify_range
from .invariants import hlk, torsion_types_h2, torsion_types_prym
from .prototypes import enumerate_h2, enumerate_prym_reduced, spin
from .qfield import decode, encode, qe
from .surface import (
    load_surface,
    make_Aminus,
    make_Aplus,
    make_L,
    make_P,
    make_Z,
    save_surface,
)

MAKERS = {
    "P": (make_P, ("a", "b", "c", "e")),
    "L": (make_L, ("e", "D")),
    "A+": (make_Aplus, ("a", "b", "c", "e")),
    "A-": (make_Aminus, ("a", "b", "c", "e")),
    "Z": (make_Z, ("e", "D")),
}


def _make_surface(kind, params):
    maker, names = MAKERS[kind]
    values = [int(p) for p in params.split(",")]
    if len(values) != len(names):
        raise SystemExit(
            f"--make {kind} expects --params {','.join(names)}")
    return maker(*values)


def _get_surface(args):
    if args.surface:
        return load_surface(args.surface)
    if args.make:
        return _make_surface(args.make, args.params)
    raise SystemExit("need --surface FILE or --make KIND --params ...")


def _parse_direction(text, D):
    parts = text.split(",")
    if len(parts) != 2:
        raise SystemExit("direction must be 'u,v'")
    def conv(p):
        p = p.strip()
        try:
            return qe(D, Fraction(p))
        except ValueError:
            return decode(p, D)
    return conv(parts[0]), conv(parts[1])


def cmd_prototypes(args):
    protos = (enumerate_h2(args.D) if args.locus == "h2"
              else enumerate_prym_reduced(args.D))
    print("locus\ta\tb\tc\te\tD\tspin")
    for p in protos:
        sp = spin(p) if p.locus == "h2" and p.D % 8 == 1 else ""
        print(f"{p.locus}\t{p.a}\t{p.b}\t{p.c}\t{p.e}\t{p.D}\t{sp}")
    return 0


def cmd_surface(args):
    s = _make_surface(args.make, args.params)
    info = s.validate()
    out = {
        "D": s.D,
        "rectangles": info["rectangles"],
        "area": encode(info["area"]),
        "genus": info["genus"],
        "stratum": list(info["stratum"]),
        "marked_points": info["marked_points"],
    }
    print(json.dumps(out, indent=1))
    if args.out:
        save_surface(s, args.out)
    return 0


def cmd_decompose(args):
    s = _get_surface(args)
    direction = _parse_direction(args.dir, s.D)
    dec = decompose(s, direction, args.max_crossings)
    ks = twist_exponents(dec)
    perm = twist_permutation(s, direction, args.max_crossings, dec)
    out = {
        "direction": args.dir,
        "cylinders": [
            {"width": encode(c.width), "height": encode(c.height),
             "core_marked": list(c.core_marked), "twist_exponent": k}
            for c, k in zip(dec.cylinders, ks)
        ],
        "marked_status": {nm: kind for nm, (kind, _) in dec.marked_status.items()},
        "permutation": str(perm),
    }
    if args.json:
        print(json.dumps(out, indent=1))
    else:
        for c in out["cylinders"]:
            print(f"cylinder width={c['width']} height={c['height']} "
                  f"twists={c['twist_exponent']} core={c['core_marked']}")
        print(f"permutation {out['permutation']}")
    return 0


def cmd_hlk(args):
    s = _make_surface(args.make, args.params)
    if args.make in ("P", "L"):
        types = torsion_types_h2(s)
    else:
        types = torsion_types_prym(s)
    integral, counts = hlk(types)
    print(json.dumps({
        "types": types,
        "integral": integral,
        "counts": counts,
    }, indent=1))
    return 0


def cmd_verify(args):
    summary = verify_range(args.locus, getattr(args, "from"), args.to,
                           args.max_crossings, args.b8_file)
    rows = [r.to_dict() for r in summary["reports"]]
    if args.json:
        by_d = {}
        for r in rows:
            entry = by_d.setdefault(r["D"], {"D": r["D"], "locus": r["locus"],
                                             "components": []})
            entry["components"].append(
                {k: r[k] for k in ("label", "witness", "L", "U", "facts",
                                   "concluded", "expected", "match", "status",
                                   "notes", "parabolic_count")})
        print(json.dumps({
            "locus": summary["locus"],
            "from": summary["from"],
            "to": summary["to"],
            "matches": summary["matches"],
            "mismatches": summary["mismatches"],
            "informational": summary["informational"],
            "skipped": summary["skipped"],
            "discriminants": [by_d[d] for d in sorted(by_d)],
        }, indent=1))
    elif args.tsv:
        print("D\tlocus\tlabel\twitness\tL\tU\tconcluded\texpected\tmatch\tstatus")
        for r in rows:
            print("\t".join(str(r[k]) for k in
                            ("D", "locus", "label", "witness", "L", "U",
                             "concluded", "expected", "match", "status")))
    else:
        for r in rows:
            flag = {True: "ok", False: "MISMATCH", None: "skipped"}[r["match"]]
            print(f"D={r['D']} {r['label']}: {r['concluded']} "
                  f"(expected {r['expected']}) [{flag}]")
        print(f"{summary['matches']} matched, {summary['mismatches']} mismatched, "
              f"{summary['skipped']} skipped, "
              f"{summary['informational']} informational")
    return 1 if summary["mismatches"] else 0


def main(argv=None):
    ap = argparse.ArgumentParser(prog="flatperm", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("prototypes", help="enumerate splitting prototypes")
    p.add_argument("--locus", choices=("h2", "prym"), default="h2")
    p.add_argument("--D", type=int, required=True)
    p.set_defaults(fn=cmd_prototypes)

    p = sub.add_parser("surface", help="build and validate a model surface")
    p.add_argument("--make", choices=sorted(MAKERS), required=True)
    p.add_argument("--params", required=True,
                   help="comma-separated integer parameters")
    p.add_argument("--out", help="save the surface as JSON")
    p.set_defaults(fn=cmd_surface)

    p = sub.add_parser("decompose", help="cylinder decomposition in a direction")
    p.add_argument("--surface", help="surface JSON file")
    p.add_argument("--make", choices=sorted(MAKERS))
    p.add_argument("--params")
    p.add_argument("--dir", required=True, help="direction 'u,v'")
    p.add_argument("--max-crossings", type=int, default=100000)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("hlk", help="torsion types and counting invariant")
    p.add_argument("--make", choices=sorted(MAKERS), required=True)
    p.add_argument("--params", required=True)
    p.set_defaults(fn=cmd_hlk)

    p = sub.add_parser("verify", help="verify the classification over a range")
    p.add_argument("--locus", choices=("h2", "prym"), required=True)
    p.add_argument("--from", type=int, required=True)
    p.add_argument("--to", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--tsv", action="store_true")
    p.add_argument("--max-crossings", type=int, default=100000)
    p.add_argument("--b8-file", help="data file for the exceptional D=8 surface")
    p.set_defaults(fn=cmd_verify)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
