"""Command line interface.

Exit codes: 0 success (goal achieved), 1 goal has a counterexample,
2 input or validation error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .algebra import format_term
from .fol import format_fol
from .frontend import SourceUnit, format_goal, parse
from .logic import (
    ModeError, Outcome, check_goal, enumerate_assignments, format_assignment,
    shape_analysis_sentence,
)
from .sexpr import ParseError
from .skeleton import Skeleton


def _load(path: str, protocols=None) -> SourceUnit:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"cannot read file: {e.strerror}", 0, 0, path) from None
    return parse(text, path, protocols)


def cmd_verify(args) -> int:
    unit = _load(args.file)
    for form in unit.forms:
        line = form.pos[0]
        if form.kind == "defprotocol":
            roles = ", ".join(r.name for r in form.value.roles)
            print(f"{args.file}:{line}: protocol {form.value.name} ({roles}): ok")
        elif form.kind == "defskeleton":
            print(f"{args.file}:{line}: skeleton with {len(form.value.instances)} strands: well-formed")
        elif form.kind == "defanalysis":
            sa = form.value
            print(f"{args.file}:{line}: analysis point of view: well-formed")
            for i, d in enumerate(sa.homomorphisms, 1):
                phi = " ".join(str(j) for j in d.phi)
                print(f"  shape {i}: well-formed; homomorphism ({phi}) satisfies conditions 1-7")
        else:
            print(f"{args.file}:{line}: {form.kind}: ok")
    return 0


def cmd_extract(args) -> int:
    unit = _load(args.file)
    if not unit.analyses:
        raise ParseError("no defanalysis form found", 0, 0, args.file)
    for n, sa in enumerate(unit.analyses, 1):
        sentence = shape_analysis_sentence(sa, full_order=args.full_order)
        if args.format == "fol":
            name = f"{sa.protocol.name}_shape_analysis"
            if len(unit.analyses) > 1:
                name += f"_{n}"
            print(format_fol(sentence, name))
        else:
            print(format_goal(sentence))
    return 0


def cmd_check_goal(args) -> int:
    unit = _load(args.analysis)
    goals = _load(args.goal, unit.protocols).goals
    if not unit.analyses:
        raise ParseError("no defanalysis form found", 0, 0, args.analysis)
    if not goals:
        raise ParseError("no defgoal form found", 0, 0, args.goal)
    status = 0
    for sa in unit.analyses:
        for g in goals:
            if g.protocol != sa.protocol:
                continue
            verdict = check_goal(sa, g)
            print(f"goal: {verdict.outcome.name}")
            print(f"checked {verdict.checked} hypothesis assignments over {len(sa.shapes)} shapes")
            for cx in verdict.counterexamples:
                print(f"shape {cx.shape}: {format_assignment(cx.assignment)}")
                for note in cx.explanations:
                    print("  " + note.replace("\n", "\n  "))
            if verdict.outcome is Outcome.ACHIEVED:
                print(f"note: {verdict.caveat}")
            else:
                status = 1
    return status


def cmd_sat(args) -> int:
    unit = _load(args.skeleton)
    formulas = _load(args.formula, unit.protocols).formulas
    skeletons: list[Skeleton] = unit.skeletons
    if not skeletons:
        raise ParseError("no defskeleton form found", 0, 0, args.skeleton)
    if not formulas:
        raise ParseError("no defformula form found", 0, 0, args.formula)
    for i, k in enumerate(skeletons):
        for f in formulas:
            if f.protocol != k.protocol:
                continue
            found = enumerate_assignments(k, f.conjunction)
            print(f"skeleton {i}: {len(found)} satisfying assignments")
            for alpha in found:
                print("  " + format_assignment(alpha))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shapesent",
        description="Shape analysis sentences and security goal checking for strand spaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check well-formedness and homomorphisms")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("extract", help="print the shape analysis sentence of each analysis")
    p.add_argument("file")
    p.add_argument("--format", choices=("sexpr", "fol"), default="sexpr")
    p.add_argument("--full-order", action="store_true",
                   help="assert the whole node order, not just communication edges")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("check-goal", help="decide a goal over the shapes of an analysis")
    p.add_argument("analysis")
    p.add_argument("goal")
    p.set_defaults(func=cmd_check_goal)

    p = sub.add_parser("sat", help="list satisfying assignments of a formula in a skeleton")
    p.add_argument("skeleton")
    p.add_argument("formula")
    p.set_defaults(func=cmd_sat)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        print(str(e), file=sys.stderr)
        return 2
    except (ModeError, ValueError) as e:
        print(f"shapesent: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
