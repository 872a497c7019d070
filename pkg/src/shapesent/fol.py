"""Export of goals and sentences as one-sorted first-order text (TPTP fof).

Sorts become unary guard predicates: a universally quantified variable's
guard is an antecedent, an existential one's guard is a conjunct.
"""

from __future__ import annotations

import re
from typing import Sequence

from .algebra import Enc, Invk, Nat, Pair, Term, Var
from .logic import (
    Atom, Equals, FalseAtom, Goal, Non, Orig, Prec, Progress, Uniq,
)


def _ident(s: str) -> str:
    s = re.sub(r"[^A-Za-z0-9_]", "_", s).lower()
    return s if s and s[0].isalpha() else "x" + s


class _Names:
    """Map variables to distinct upper-case names: a stem plus a counter."""

    def __init__(self):
        self.counters: dict[str, int] = {}
        self.names: dict[Var, str] = {}

    def bind(self, v: Var) -> str:
        m = re.match(r"[A-Za-z]+", v.name)
        stem = m.group(0).capitalize() if m else "V"
        n = self.counters.get(stem, 0)
        self.counters[stem] = n + 1
        name = f"{stem}{n}"
        self.names[v] = name
        return name

    def term(self, t: Term) -> str:
        if isinstance(t, Var):
            return self.names[t]
        if isinstance(t, Nat):
            return str(t.value)
        if isinstance(t, Pair):
            return f"pair({self.term(t.left)},{self.term(t.right)})"
        if isinstance(t, Enc):
            return f"enc({self.term(t.body)},{self.term(t.key)})"
        if isinstance(t, Invk):
            return f"invk({self.term(t.key)})"
        raise TypeError(f"not a term: {t!r}")

    def atom(self, a: Atom) -> str:
        f = self.term
        if isinstance(a, Progress):
            pred = f"p_{_ident(a.role.name)}_{a.height}_{_ident(a.var.name)}"
            return f"{pred}({f(a.strand)},{f(a.msg)})"
        if isinstance(a, Prec):
            return "prec(" + ",".join(f(t) for t in a.terms) + ")"
        if isinstance(a, Non):
            return f"non({f(a.term)})"
        if isinstance(a, Uniq):
            return f"uniq({f(a.term)})"
        if isinstance(a, Orig):
            return "orig(" + ",".join(f(t) for t in a.terms) + ")"
        if isinstance(a, Equals):
            return f"{f(a.left)} = {f(a.right)}"
        if isinstance(a, FalseAtom):
            return "$false"
        raise TypeError(f"not an atom: {a!r}")


def _conj(parts: Sequence[str], indent: str) -> str:
    if not parts:
        return "$true"
    if len(parts) == 1:
        return parts[0]
    return "(" + f"\n{indent}& ".join(parts) + ")"


def format_fol(g: Goal, name: str | None = None, role: str = "axiom") -> str:
    names = _Names()
    univ = [names.bind(v) for v in g.vars]
    guards = [f"{v.sort.value}({names.names[v]})" for v in g.vars]
    hyp = _conj(guards + [names.atom(a) for a in g.hypothesis], "      ")
    disjuncts = []
    for d in g.disjuncts:
        bound = [names.bind(v) for v in d.vars]
        body = [f"{v.sort.value}({names.names[v]})" for v in d.vars]
        body += [names.atom(a) for a in d.atoms]
        inner = _conj(body, "          ")
        disjuncts.append(f"(?[{','.join(bound)}] :\n        {inner})" if bound else inner)
    concl = "$false" if not disjuncts else "\n      | ".join(disjuncts)
    if len(disjuncts) > 1:
        concl = "(" + concl + ")"
    body = f"({hyp}\n    =>\n      {concl})"
    if univ:
        body = f"![{','.join(univ)}] :\n    {body}"
    label = _ident(name or f"{g.protocol.name}_shape_analysis")
    return f"fof({label}, {role},\n  {body})."
