#!/usr/bin/env python3
"""
feynman-pde command line

    feynman-pde generate --ladder 2 --out double-box.json
    feynman-pde polys double-box.json
    feynman-pde pde double-box.json --mode thm2 --out double-box.ops.json
    feynman-pde verify double-box.json double-box.ops.json --numeric point.json

Progress goes to stderr, results to stdout (or --out). Exit codes: 0 ok,
2 unreadable input, 3 empty kernel, 4 exponent regime, 5 certification
failure, 6 numeric failure.
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional

from config import SETTINGS
from errors import FeynmanPDEError
from formats import (
    diagram_hash,
    dump_operators,
    dumps,
    load_diagram,
    load_operators,
    load_point,
)
from graph import Diagram, build_bubble, build_ladder, build_one_loop, build_triangle
from pde import derive_general, theorem1_system, theorem2_system
from symanzik import (
    ParametricIntegral,
    check_property_p,
    partition_representatives,
    w_polynomial,
)
from verify import NumericConfig, verify_pairs

EXIT_EMPTY_KERNEL = 3
EXIT_CERTIFICATION = 5
EXIT_NUMERIC = 6


def progress(message: str):
    print(message, file=sys.stderr)


def emit(text: str, out: Optional[str] = None):
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        progress(f"📄 Wrote {path}")
    else:
        sys.stdout.write(text)


# generate


def cmd_generate(args) -> int:
    if args.ladder is not None:
        d = build_ladder(args.ladder, args.dim or 4)
    elif args.box:
        d = build_ladder(1, args.dim or 4)
    elif args.one_loop is not None:
        d = build_one_loop(args.one_loop, args.dim or 2)
    elif args.triangle:
        d = build_triangle(args.dim or 2)
    else:
        d = build_bubble(args.dim or 2)
    progress(f"✅ Generated {d.name}: {d.n_vertices} vertices, {d.n_lines} lines, D={d.dimension}")
    emit(dumps(d.to_spec()), args.out)
    return 0


# polys


def polys_report(integral: ParametricIntegral) -> Dict:
    d: Diagram = integral.diagram
    w_entries = []
    for chi in partition_representatives(d):
        names = [d.vertices[i].name for i in sorted(chi)]
        w = w_polynomial(d, names, integral.alphabet)
        if w.is_zero():
            continue
        position = integral.basis.position(chi)
        w_entries.append(
            {
                "chi": names,
                "basis_index": None if position is None else position + 1,
                "poly": w.render(),
            }
        )
    holds, offending = check_property_p(d, integral.basis)
    return {
        "diagram": d.name,
        "diagram_hash": diagram_hash(d),
        "D": d.dimension,
        "lines": d.n_lines,
        "loops": integral.h,
        "exponents": {"a": integral.a, "k": integral.k},
        "basis": [list(names) for names in integral.basis.names],
        "U": integral.U.render(),
        "W": w_entries,
        "Q": integral.Q.render(),
        "property_p": {"holds": holds, "offending": [list(c) for c in offending]},
    }


def _polys_text(report: Dict) -> str:
    lines = [
        f"📊 {report['diagram']}: N={report['lines']}, h={report['loops']}, D={report['D']}, "
        f"a={report['exponents']['a']}, k={report['exponents']['k']}",
        f"U = {report['U']}",
    ]
    for entry in report["W"]:
        tag = f"  [s{entry['basis_index']}]" if entry["basis_index"] else ""
        lines.append(f"W{{{','.join(entry['chi'])}}} = {entry['poly']}{tag}")
    lines.append(f"Q = {report['Q']}")
    prop = report["property_p"]
    if prop["holds"]:
        lines.append(f"✅ property (P) holds for basis {report['basis']}")
    else:
        lines.append(f"⚠️ property (P) fails: nonzero W for {prop['offending']}")
    return "\n".join(lines) + "\n"


def cmd_polys(args) -> int:
    integral = ParametricIntegral(load_diagram(args.diagram))
    report = polys_report(integral)
    if args.format == "json":
        emit(dumps(report), args.out)
    else:
        emit(_polys_text(report), args.out)
    return 0


# pde


def cmd_pde(args) -> int:
    integral = ParametricIntegral(load_diagram(args.diagram))
    integral.require_regime()
    d = integral.diagram
    progress(
        f"🚀 {args.mode} for {d.name} (N={integral.n_lines}, h={integral.h}, "
        f"D={d.dimension}, a={integral.a}, k={integral.k})"
    )
    if args.mode == "thm1":
        pairs = theorem1_system(integral)
    elif args.mode == "thm2":
        pairs = theorem2_system(integral)
    else:
        order = args.order or integral.q
        degree = SETTINGS.coeff_degree if args.coeff_degree is None else args.coeff_degree
        progress(f"🔍 Solving for order {order} operators, coefficient degree <= {degree}")
        pairs = derive_general(integral, order, degree)
    if not pairs:
        progress("⚠️ Empty kernel: no annihilating pair in this ansatz")
        return EXIT_EMPTY_KERNEL
    progress(f"✅ {len(pairs)} certified pairs")
    emit(dumps(dump_operators(integral, pairs)), args.out)
    return 0


# verify


def _verify_text(report: Dict) -> str:
    lines = []
    for entry in report["pairs"]:
        if entry["status"] == "ok":
            line = f"✅ {entry['label']}  {entry['certificate_hash'][:16]}"
            if entry["numeric_residual"] is not None:
                line += f"  residual={entry['numeric_residual']:.3e}"
        else:
            line = f"❌ {entry['message']}"
            if entry["residual"]:
                line += f"\n   residual: {entry['residual']}"
        lines.append(line)
    ok = sum(1 for e in report["pairs"] if e["status"] == "ok")
    lines.append(f"📊 {ok}/{len(report['pairs'])} pairs verified for {report['diagram']}")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    integral = ParametricIntegral(load_diagram(args.diagram))
    integral.require_regime()
    pairs = load_operators(integral, args.operators)
    cfg = None
    if args.numeric:
        cfg = NumericConfig(
            point=load_point(args.numeric),
            nodes=args.nodes or SETTINGS.quad_nodes,
        )
    progress(f"🔍 Verifying {len(pairs)} pairs for {integral.diagram.name}")
    results = verify_pairs(integral, pairs, cfg, args.tolerance)
    report = {
        "diagram": integral.diagram.name,
        "diagram_hash": diagram_hash(integral.diagram),
        "ok": all(r.ok for r in results),
        "pairs": [r.to_json() for r in results],
    }
    if args.format == "json":
        emit(dumps(report), args.out)
    else:
        emit(_verify_text(report), args.out)
    if any(r.certificate_hash is None for r in results):
        return EXIT_CERTIFICATION
    if not report["ok"]:
        return EXIT_NUMERIC
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feynman-pde",
        description="Exact PDE systems for parametric Feynman integrals",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a corpus diagram file")
    family = gen.add_mutually_exclusive_group(required=True)
    family.add_argument("--ladder", type=int, metavar="H", help="h-loop ladder")
    family.add_argument("--bubble", action="store_true")
    family.add_argument("--triangle", action="store_true")
    family.add_argument("--box", action="store_true", help="the one-loop ladder")
    family.add_argument("--one-loop", type=int, metavar="N", help="one-loop N-point polygon")
    gen.add_argument("-D", dest="dim", type=int, help="space-time dimension")
    gen.add_argument("--out", help="output file (default: stdout)")
    gen.set_defaults(func=cmd_generate)

    polys = sub.add_parser("polys", help="print U, W and Q of a diagram")
    polys.add_argument("diagram")
    polys.add_argument("--format", choices=["text", "json"], default="text")
    polys.add_argument("--out")
    polys.set_defaults(func=cmd_polys)

    pde = sub.add_parser("pde", help="derive certified operator pairs")
    pde.add_argument("diagram")
    pde.add_argument("--mode", choices=["thm1", "thm2", "derive"], default="thm1")
    pde.add_argument("--order", type=int, help="derivative order for --mode derive")
    pde.add_argument("--coeff-degree", type=int, help="(s, z)-degree of the coefficients")
    pde.add_argument("--out")
    pde.set_defaults(func=cmd_pde)

    ver = sub.add_parser("verify", help="re-certify an operator file")
    ver.add_argument("diagram")
    ver.add_argument("operators")
    ver.add_argument("--numeric", metavar="POINT", help="point file for the numeric check")
    ver.add_argument("--nodes", type=int, help="Gauss-Legendre nodes per axis")
    ver.add_argument("--tolerance", type=float, help="numeric residual threshold")
    ver.add_argument("--format", choices=["text", "json"], default="text")
    ver.add_argument("--out")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FeynmanPDEError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
