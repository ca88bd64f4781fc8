"""Command-line entry point.

Every subcommand prints a short summary on stdout and writes its full JSON
report to ``--out`` (or to stdout with ``--json``).  Exit codes: 0 when all
checks pass, 1 when a verification fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import colex as lat
from .group import (
    GroupError,
    abelianization,
    color_code_anyon_count,
    conjugacy_classes,
    count_double_anyons,
    make_group,
)
from .mapping import MappingError, verify_algebra, verify_encoded_dims, verify_rotation, verify_stabilizer_mapping
from .qdouble import qd_degeneracy
from .spectrum import degeneracy
from .stabilizer import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    BudgetError,
    build_stabilizers,
    check_commutation,
    check_red_order_independence,
    find_noncommuting_witness,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(args, summary: list[str], doc: dict) -> None:
    for line in summary:
        print(line)
    text = _dump(doc)
    if args.out:
        Path(args.out).write_text(text)
    elif args.json:
        sys.stdout.write(text)


def _lattice(args) -> lat.Colex2:
    sources = [s for s in (getattr(args, "source", None), args.lattice) if s]
    if len(sources) != 1:
        raise InputError("give exactly one lattice source (a builder spec or a file)")
    src = sources[0]
    if Path(src).is_file():
        colex = lat.load(src)
        return colex if colex.name else replace(colex, name=Path(src).stem)
    return lat.build_from_spec(src)


def _group(args):
    if not args.group:
        raise InputError("--group is required")
    return make_group(args.group)


# --------------------------------------------------------------------------
# subcommands


def cmd_group_info(args) -> int:
    G = _group(args)
    ab = abelianization(G)
    doc = {
        "group": G.name,
        "order": G.order,
        "abelian": G.is_abelian(),
        "commutator_order": ab.kernel.order,
        "abelianization_order": ab.quotient.order,
        "conjugacy_classes": len(conjugacy_classes(G)),
        "double_anyons": count_double_anyons(G),
        "color_code_anyons": color_code_anyon_count(G),
    }
    _emit(args, [f"{k}={doc[k]}" for k in sorted(doc)], doc)
    return EXIT_OK


def _lattice_doc(colex: lat.Colex2) -> dict:
    counts = {c: len(colex.plaquettes_of(c)) for c in "RGB"}
    return {
        "lattice": colex.name,
        "vertices": colex.n_vertices,
        "edges": len(colex.edges),
        "plaquettes": counts,
        "red_links": len(colex.red_links),
        "corner_C_sites": len(colex.corner_C_sites),
        "degenerate": colex.degenerate,
    }


def cmd_lattice_build(args) -> int:
    colex = _lattice(args)
    doc = _lattice_doc(colex)
    p = doc["plaquettes"]
    line = f"vertices={doc['vertices']} edges={doc['edges']} red={p['R']} green={p['G']} blue={p['B']}"
    print(line)
    if args.out:
        lat.save(colex, args.out)
    elif args.json:
        sys.stdout.write(_dump(lat.to_json(colex)))
    return EXIT_OK


def cmd_lattice_validate(args) -> int:
    colex = _lattice(args)
    rep = lat.validate(colex)
    doc = {"lattice": colex.name, "ok": rep.ok, "failures": rep.failures}
    _emit(args, ["valid" if rep.ok else f"invalid: {rep.first()}"], doc)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_lattice_dot(args) -> int:
    text = lat.export_dot(_lattice(args))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_stab_check(args) -> int:
    G = _group(args)
    colex = _lattice(args)
    stabs = build_stabilizers(colex, G)
    rep = check_commutation(colex, G, args.mode, args.samples, args.seed, args.budget_states, stabs,
                            args.workers)
    doc = rep.to_json()
    doc["seed"] = args.seed
    doc.update(lattice=colex.name, group=G.name)
    lines = [f"pairs_checked={rep.pairs_checked} failures={len(rep.failures)} mode={rep.mode}"]
    if not G.is_abelian():
        w = find_noncommuting_witness(colex, G, args.mode, args.samples, args.seed, stabs)
        doc["undressed_witness"] = w
        lines.append("undressed blue/green witness: " + (f"{w['opA']} vs {w['opB']}" if w else "none on this lattice"))
    _emit(args, lines, doc)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_stab_red_order(args) -> int:
    G = _group(args)
    doc = check_red_order_independence(G, args.factors, args.samples, args.seed)
    _emit(args, [f"tuples={doc['tuples']} orderings={doc['orderings']} failures={len(doc['failures'])}"], doc)
    return EXIT_OK if not doc["failures"] else EXIT_FAIL


def cmd_degeneracy(args) -> int:
    G = _group(args)
    colex = _lattice(args)
    rep = degeneracy(colex, G, args.method, args.budget_states)
    _emit(args, [rep.summary()], rep.to_json())
    return EXIT_OK


def _size(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise InputError(f"size must look like 2x2, not {text!r}") from None


def cmd_qd_degeneracy(args) -> int:
    G = _group(args)
    L1, L2 = _size(args.size)
    rep = qd_degeneracy(L1, L2, G, args.method, args.budget_states)
    doc = rep.to_json()
    doc["double_anyons"] = count_double_anyons(G)
    _emit(args, [rep.summary()], doc)
    return EXIT_OK


def cmd_map_verify(args) -> int:
    G = _group(args)
    reports = [verify_encoded_dims(G), verify_algebra(G), verify_rotation(G)]
    full = args.full_z2
    if full and G.order != 2:
        raise InputError("--full-z2 needs a group of order 2")
    reports.append(verify_stabilizer_mapping(G, full=full))
    ok = all(r["ok"] for r in reports)
    lines = [f"{r['check']}: {'pass' if r['ok'] else 'FAIL'}" for r in reports]
    lines.insert(0, f"codespace dimension={reports[0]['dimension']}")
    _emit(args, lines, {"group": G.name, "ok": ok, "reports": reports})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_anyons(args) -> int:
    G = _group(args)
    n = color_code_anyon_count(G) if args.color_code else count_double_anyons(G)
    doc = {"group": G.name, "color_code": args.color_code, "anyons": n}
    _emit(args, [str(n)], doc)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, lattice: bool = False) -> None:
    p.add_argument("--group", help="group descriptor: Z<n>, S<n>, D<n>, Q8, products like S3xZ2, or a table file")
    if lattice:
        p.add_argument("--lattice", help="builder spec such as hex-torus:1, or a lattice JSON file")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--json", action="store_true", help="print the JSON report on stdout")


def _budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget-states", type=int, default=None,
                   help="state budget (default from GCOLEX_BUDGET_STATES or 2e8)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gcolex", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group").add_subparsers(dest="action", required=True)
    p = g.add_parser("info", help="order, commutator subgroup and anyon counts")
    _common(p)
    p.set_defaults(func=cmd_group_info)

    lt = sub.add_parser("lattice").add_subparsers(dest="action", required=True)
    for name, func, hlp in (("build", cmd_lattice_build, "build a lattice and save it as JSON"),
                            ("validate", cmd_lattice_validate, "check every lattice invariant"),
                            ("export-dot", cmd_lattice_dot, "Graphviz DOT export")):
        p = lt.add_parser(name, help=hlp)
        p.add_argument("source", nargs="?", help="builder spec or lattice file")
        p.add_argument("--lattice", help="builder spec or lattice file")
        p.add_argument("--out")
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)

    st = sub.add_parser("stab").add_subparsers(dest="action", required=True)
    p = st.add_parser("check", help="pairwise commutation of the stabilizers")
    _common(p, lattice=True)
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    _budget(p)
    p.set_defaults(func=cmd_stab_check)
    p = st.add_parser("red-order", help="order independence of [G,G] membership")
    _common(p)
    p.add_argument("--factors", type=int, default=4)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_stab_red_order)

    p = sub.add_parser("degeneracy", help="ground-space degeneracy of a G-color code")
    _common(p, lattice=True)
    p.add_argument("--method", choices=("auto", "orbit", "rank_oracle", "burnside"), default="auto")
    p.add_argument("--workers", type=int, default=1, help="accepted for symmetry; counting is single-threaded")
    _budget(p)
    p.set_defaults(func=cmd_degeneracy)

    qd = sub.add_parser("qd").add_subparsers(dest="action", required=True)
    p = qd.add_parser("degeneracy", help="quantum double degeneracy on an L1xL2 torus")
    _common(p)
    p.add_argument("--size", default="2x2")
    p.add_argument("--method", choices=("auto", "orbit", "rank_oracle", "burnside"), default="auto")
    _budget(p)
    p.set_defaults(func=cmd_qd_degeneracy)

    mp = sub.add_parser("map").add_subparsers(dest="action", required=True)
    p = mp.add_parser("verify", help="encoding of the 4.8.8 code into two quantum doubles")
    _common(p)
    p.add_argument("--full-z2", action="store_true", help="also conjugate the whole n=2 lattice (Z2)")
    p.set_defaults(func=cmd_map_verify)

    p = sub.add_parser("anyons", help="anyon count of D(G), or of the G-color code")
    _common(p)
    p.add_argument("--color-code", action="store_true")
    p.set_defaults(func=cmd_anyons)
    return ap


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, GroupError, lat.LatticeError, MappingError, BudgetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
