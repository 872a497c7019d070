"""Parsing and printing of the S-expression file syntax.

Top-level forms are ``defprotocol``, ``defskeleton``, ``defanalysis``,
``defgoal`` and ``defformula``.  A protocol must be defined before any form
that refers to it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .algebra import (
    Enc, Invk, Nat, Sort, SortError, Term, Var, canonicalize, format_term,
    make_varset, pair,
)
from .homomorphism import Homomorphism, HomomorphismError
from .logic import (
    Atom, Conjunction, Equals, Existential, FalseAtom, Goal, Non, Orig, Prec,
    Progress, ShapeAnalysis, Uniq,
)
from .sexpr import Int, ParseError, SExpr, SList, Sym, read_all
from .skeleton import (
    Direction, Event, Instance, Node, Protocol, Role, Skeleton,
    WellFormednessError, check_wellformed,
)


@dataclass
class Formula:
    protocol: Protocol
    conjunction: Conjunction


@dataclass
class Form:
    kind: str
    value: object
    pos: tuple[int, int]


@dataclass
class SourceUnit:
    forms: list[Form] = field(default_factory=list)
    protocols: dict[str, Protocol] = field(default_factory=dict)

    def _of(self, kind):
        return [f.value for f in self.forms if f.kind == kind]

    @property
    def skeletons(self) -> list[Skeleton]:
        return self._of("defskeleton")

    @property
    def analyses(self) -> list[ShapeAnalysis]:
        return self._of("defanalysis")

    @property
    def goals(self) -> list[Goal]:
        return self._of("defgoal")

    @property
    def formulas(self) -> list[Formula]:
        return self._of("defformula")


class _Parser:
    def __init__(self, filename: Optional[str], protocols: dict[str, Protocol]):
        self.filename = filename
        self.protocols = protocols

    def error(self, msg: str, node) -> ParseError:
        line, col = getattr(node, "pos", (0, 0))
        return ParseError(msg, line, col, self.filename)

    # ---------------------------------------------------------- helpers

    def expect_list(self, node, what: str, head: Optional[str] = None) -> SList:
        if not isinstance(node, SList):
            raise self.error(f"expected {what}", node)
        if head is not None and node.head != head:
            raise self.error(f"expected ({head} ...)", node)
        return node

    def symbol(self, node, what: str) -> str:
        if not isinstance(node, Sym):
            raise self.error(f"expected {what}", node)
        return node.name

    def integer(self, node, what: str) -> int:
        if not isinstance(node, Int):
            raise self.error(f"expected {what}", node)
        return node.value

    def vars_block(self, items: Sequence, at) -> tuple[Var, ...]:
        out = []
        for group in items:
            g = self.expect_list(group, "variable declaration (name ... sort)")
            if len(g) < 2:
                raise self.error("variable declaration needs names and a sort", g)
            try:
                sort = Sort.parse(self.symbol(g[-1], "sort"))
            except SortError as e:
                raise self.error(str(e), g[-1]) from None
            for name in g[:-1]:
                out.append(Var(self.symbol(name, "variable name"), sort))
        try:
            return make_varset(out)
        except SortError as e:
            raise self.error(str(e), at) from None

    def term(self, node, scope: dict[str, Var], allow_nat: bool = False) -> Term:
        try:
            return canonicalize(self._term(node, scope, allow_nat))
        except SortError as e:
            raise self.error(str(e), node) from None

    def _term(self, node, scope, allow_nat) -> Term:
        if isinstance(node, Int):
            if not allow_nat:
                raise self.error("number where a message was expected", node)
            return Nat(node.value)
        if isinstance(node, Sym):
            v = scope.get(node.name)
            if v is None:
                raise self.error(f"unknown variable {node.name}", node)
            return v
        if not isinstance(node, SList) or node.head is None:
            raise self.error("malformed term", node)
        op, args = node.head, node.items[1:]
        if op == "cat":
            if len(args) < 2:
                raise self.error("cat needs at least two arguments", node)
            return pair(*(self._term(a, scope, False) for a in args))
        if op == "enc":
            if len(args) < 2:
                raise self.error("enc needs a body and a key", node)
            parts = [self._term(a, scope, False) for a in args]
            return Enc(pair(*parts[:-1]), parts[-1])
        if op == "invk":
            if len(args) != 1:
                raise self.error("invk takes one argument", node)
            return Invk(self._term(args[0], scope, False))
        raise self.error(f"unknown operation {op}", node)

    def protocol(self, node) -> Protocol:
        name = self.symbol(node, "protocol name")
        proto = self.protocols.get(name)
        if proto is None:
            raise self.error(f"unknown protocol {name}", node)
        return proto

    # ---------------------------------------------------------- protocols

    def defprotocol(self, form: SList) -> Protocol:
        if len(form) < 2:
            raise self.error("defprotocol needs a name", form)
        name = self.symbol(form[1], "protocol name")
        items = list(form.items[2:])
        if items and isinstance(items[0], Sym):
            items = items[1:]  # algebra name, e.g. basic
        roles = []
        for item in items:
            r = self.expect_list(item, "(defrole ...)", "defrole")
            roles.append(self.defrole(r))
        if not roles:
            raise self.error("protocol has no roles", form)
        if len({r.name for r in roles}) != len(roles):
            raise self.error("duplicate role names", form)
        if name in self.protocols:
            raise self.error(f"protocol {name} is already defined", form)
        proto = Protocol(name, tuple(roles))
        self.protocols[name] = proto
        return proto

    def defrole(self, form: SList) -> Role:
        if len(form) != 4:
            raise self.error("expected (defrole name (vars ...) (trace ...))", form)
        name = self.symbol(form[1], "role name")
        vblock = self.expect_list(form[2], "(vars ...)", "vars")
        rvars = self.vars_block(vblock.items[1:], vblock)
        scope = {v.name: v for v in rvars}
        tblock = self.expect_list(form[3], "(trace ...)", "trace")
        events = []
        for ev in tblock.items[1:]:
            e = self.expect_list(ev, "(send t) or (recv t)")
            if e.head not in ("send", "recv") or len(e) != 2:
                raise self.error("expected (send t) or (recv t)", e)
            events.append(Event(Direction(e.head), self.term(e[1], scope)))
        if not events:
            raise self.error("role trace is empty", tblock)
        try:
            return Role(name, rvars, tuple(events))
        except WellFormednessError as e:
            raise self.error(str(e), form) from None

    # ---------------------------------------------------------- skeletons

    def skeleton_body(self, items: Sequence, at, allow_maps: bool = False):
        if not items:
            raise self.error("missing protocol name", at)
        proto = self.protocol(items[0])
        rest = list(items[1:])
        if not rest or not (isinstance(rest[0], SList) and rest[0].head == "vars"):
            raise self.error("expected (vars ...) after the protocol name", at)
        kvars = self.vars_block(rest[0].items[1:], rest[0])
        scope = {v.name: v for v in kvars}
        instances, orderings, non, uniq = [], set(), [], []
        maps = None
        for clause in rest[1:]:
            c = self.expect_list(clause, "skeleton clause")
            if c.head == "defstrand":
                instances.append(self.defstrand(c, proto, scope))
            elif c.head == "precedes":
                for edge in c.items[1:]:
                    e = self.expect_list(edge, "((s i) (s i))")
                    if len(e) != 2:
                        raise self.error("expected ((s i) (s i))", e)
                    orderings.add((self.node(e[0]), self.node(e[1])))
            elif c.head == "non-orig":
                non.extend(self.term(t, scope) for t in c.items[1:])
            elif c.head == "uniq-orig":
                uniq.extend(self.term(t, scope) for t in c.items[1:])
            elif c.head == "maps" and allow_maps:
                if maps is not None:
                    raise self.error("duplicate maps clause", c)
                maps = c
            else:
                raise self.error(f"unexpected clause {c.head}", c)
        if not instances:
            raise self.error("skeleton has no strands", at)
        k = Skeleton(
            protocol=proto,
            vars=kvars,
            instances=tuple(instances),
            orderings=frozenset(orderings),
            non=tuple(dict.fromkeys(non)),
            uniq=tuple(dict.fromkeys(uniq)),
        )
        problems = check_wellformed(k)
        if problems:
            raise self.error("ill-formed skeleton: " + "; ".join(problems), at)
        return (k, maps) if allow_maps else k

    def node(self, node) -> Node:
        n = self.expect_list(node, "node (strand index)")
        if len(n) != 2:
            raise self.error("node must be (strand index)", n)
        return Node(self.integer(n[0], "strand number"), self.integer(n[1], "event index"))

    def defstrand(self, form: SList, proto: Protocol, scope) -> Instance:
        if len(form) < 3:
            raise self.error("expected (defstrand role height (var term) ...)", form)
        rname = self.symbol(form[1], "role name")
        try:
            role = proto.role(rname)
        except KeyError:
            raise self.error(f"unknown role {rname}", form[1]) from None
        height = self.integer(form[2], "height")
        if not 1 <= height <= len(role.trace):
            raise self.error(f"height {height} out of range for role {rname}", form[2])
        subst = {}
        for b in form.items[3:]:
            bind = self.expect_list(b, "(role-variable term)")
            if len(bind) != 2:
                raise self.error("binding must be (role-variable term)", bind)
            vname = self.symbol(bind[0], "role variable")
            try:
                x = role.var(vname)
            except KeyError:
                raise self.error(f"role {rname} has no variable {vname}", bind[0]) from None
            if x in subst:
                raise self.error(f"{vname} bound twice", bind)
            subst[x] = self.term(bind[1], scope)
        return Instance(role, height, subst)

    def defskeleton(self, form: SList) -> Skeleton:
        return self.skeleton_body(form.items[1:], form)

    def defanalysis(self, form: SList) -> ShapeAnalysis:
        items = list(form.items[1:])
        if not items:
            raise self.error("defanalysis needs a (pov ...) clause", form)
        pov_form = self.expect_list(items[0], "(pov ...)", "pov")
        pov = self.skeleton_body(pov_form.items[1:], pov_form)
        homs = []
        for item in items[1:]:
            sf = self.expect_list(item, "(shape ...)", "shape")
            shape, maps = self.skeleton_body(sf.items[1:], sf, allow_maps=True)
            if shape.protocol != pov.protocol:
                raise self.error("shape uses a different protocol", sf)
            if maps is None:
                raise self.error("shape needs a (maps (strands) (bindings)) clause", sf)
            phi, sigma = self.maps(maps, pov, shape)
            try:
                homs.append(Homomorphism.create(pov, shape, phi, sigma))
            except HomomorphismError as e:
                raise self.error("not a homomorphism: " + str(e), maps) from None
        return ShapeAnalysis(pov, tuple(homs))

    def maps(self, form: SList, pov: Skeleton, shape: Skeleton):
        if len(form) != 3:
            raise self.error("expected (maps (strands) ((var term) ...))", form)
        strands = self.expect_list(form[1], "strand list")
        phi = [self.integer(s, "strand number") for s in strands]
        pov_scope = {v.name: v for v in pov.vars}
        shape_scope = {v.name: v for v in shape.vars}
        sigma = {}
        for b in self.expect_list(form[2], "binding list"):
            bind = self.expect_list(b, "(var term)")
            if len(bind) != 2:
                raise self.error("binding must be (var term)", bind)
            name = self.symbol(bind[0], "variable")
            x = pov_scope.get(name)
            if x is None:
                raise self.error(f"{name} is not a point-of-view variable", bind[0])
            sigma[x] = self.term(bind[1], shape_scope)
        return phi, sigma

    # ---------------------------------------------------------- formulas

    def atom(self, node, proto: Protocol, scope) -> Atom:
        a = self.expect_list(node, "atomic formula")
        head, args = a.head, a.items[1:]
        try:
            if head == "p":
                if len(args) != 5:
                    raise self.error("expected (p role height var strand term)", a)
                rname = self.symbol(args[0], "role name")
                try:
                    role = proto.role(rname)
                except KeyError:
                    raise self.error(f"unknown role {rname}", args[0]) from None
                h = self.integer(args[1], "height")
                vname = self.symbol(args[2], "role variable")
                try:
                    x = role.var(vname)
                except KeyError:
                    raise self.error(f"role {rname} has no variable {vname}", args[2]) from None
                return Progress(role, h, x, self.term(args[3], scope, True),
                                self.term(args[4], scope))
            if head == "prec":
                if len(args) != 4:
                    raise self.error("expected (prec z i z' i')", a)
                return Prec(*(self.term(t, scope, True) for t in args))
            if head in ("non", "uniq"):
                if len(args) != 1:
                    raise self.error(f"expected ({head} term)", a)
                cls = Non if head == "non" else Uniq
                return cls(self.term(args[0], scope))
            if head == "orig":
                if len(args) != 3:
                    raise self.error("expected (orig term z i)", a)
                return Orig(self.term(args[0], scope), self.term(args[1], scope, True),
                            self.term(args[2], scope, True))
            if head == "=":
                if len(args) != 2:
                    raise self.error("expected (= t1 t2)", a)
                return Equals(self.term(args[0], scope, True), self.term(args[1], scope, True))
            if head == "false":
                if args:
                    raise self.error("false takes no arguments", a)
                return FalseAtom()
        except SortError as e:
            raise self.error(str(e), a) from None
        raise self.error(f"unknown predicate {head}", a)

    def conjunction(self, node, proto, scope) -> tuple[Atom, ...]:
        c = self.expect_list(node, "formula")
        if c.head == "and":
            return tuple(self.atom(x, proto, scope) for x in c.items[1:])
        return (self.atom(c, proto, scope),)

    def defgoal(self, form: SList) -> Goal:
        if len(form) != 3:
            raise self.error("expected (defgoal protocol (forall ...))", form)
        proto = self.protocol(form[1])
        fa = self.expect_list(form[2], "(forall ...)", "forall")
        if len(fa) != 3:
            raise self.error("expected (forall (vars) (implies ...))", fa)
        qvars = self.vars_block(self.expect_list(fa[1], "variable list"), fa[1])
        scope = {v.name: v for v in qvars}
        imp = self.expect_list(fa[2], "(implies ...)", "implies")
        if len(imp) != 3:
            raise self.error("expected (implies hypothesis conclusion)", imp)
        hyp = self.conjunction(imp[1], proto, scope)
        concl = self.expect_list(imp[2], "conclusion")
        if concl.head == "false" and len(concl) == 1:
            disjuncts = ()
        elif concl.head == "or":
            disjuncts = tuple(self.disjunct(d, proto, scope) for d in concl.items[1:])
        else:
            disjuncts = (self.disjunct(concl, proto, scope),)
        try:
            return Goal(proto, qvars, hyp, disjuncts)
        except SortError as e:
            raise self.error(str(e), form) from None

    def disjunct(self, node, proto, scope) -> Existential:
        d = self.expect_list(node, "disjunct")
        if d.head == "exists":
            if len(d) != 3:
                raise self.error("expected (exists (vars) formula)", d)
            evars = self.vars_block(self.expect_list(d[1], "variable list"), d[1])
            for v in evars:
                if v.name in scope:
                    raise self.error(f"{v.name} shadows an outer variable", d[1])
            inner = dict(scope)
            inner.update((v.name, v) for v in evars)
            return Existential(evars, self.conjunction(d[2], proto, inner))
        return Existential((), self.conjunction(d, proto, scope))

    def defformula(self, form: SList) -> Formula:
        if len(form) != 4:
            raise self.error("expected (defformula protocol (vars ...) formula)", form)
        proto = self.protocol(form[1])
        vblock = self.expect_list(form[2], "(vars ...)", "vars")
        fvars = self.vars_block(vblock.items[1:], vblock)
        scope = {v.name: v for v in fvars}
        atoms = self.conjunction(form[3], proto, scope)
        return Formula(proto, Conjunction(fvars, atoms))


_HANDLERS = {
    "defprotocol": _Parser.defprotocol,
    "defskeleton": _Parser.defskeleton,
    "defanalysis": _Parser.defanalysis,
    "defgoal": _Parser.defgoal,
    "defformula": _Parser.defformula,
}


def parse(text: str, filename: Optional[str] = None,
          protocols: Optional[dict[str, Protocol]] = None) -> SourceUnit:
    """Parse a source text into checked values.

    ``protocols`` seeds the protocol table, e.g. with protocols from a
    previously parsed file.  Raises ParseError with a position on any
    failure.
    """
    known = dict(protocols or {})
    p = _Parser(filename, known)
    unit = SourceUnit(protocols=known)
    for form in read_all(text, filename):
        if not isinstance(form, SList) or form.head not in _HANDLERS:
            raise p.error("expected a top-level form (defprotocol, defskeleton, "
                          "defanalysis, defgoal or defformula)", form)
        try:
            value = _HANDLERS[form.head](p, form)
        except ParseError:
            raise
        except (ValueError, KeyError, TypeError, RecursionError) as e:
            raise p.error(f"invalid {form.head}: {e}", form) from None
        unit.forms.append(Form(form.head, value, form.pos))
    return unit


def parse_term(text: str, vars: Iterable[Var], allow_nat: bool = False) -> Term:
    forms = read_all(text)
    if len(forms) != 1:
        raise ParseError("expected exactly one term", 1, 1)
    return _Parser(None, {}).term(forms[0], {v.name: v for v in vars}, allow_nat)


# ---------------------------------------------------------------- printing

def format_vars(vs: Sequence[Var]) -> str:
    groups: list[tuple[Sort, list[str]]] = []
    for v in vs:
        if groups and groups[-1][0] is v.sort:
            groups[-1][1].append(v.name)
        else:
            groups.append((v.sort, [v.name]))
    return " ".join("(" + " ".join(names) + f" {sort.value})" for sort, names in groups)


def format_protocol(p: Protocol) -> str:
    lines = [f"(defprotocol {p.name} basic"]
    for r in p.roles:
        lines.append(f"  (defrole {r.name}")
        lines.append(f"    (vars {format_vars(r.vars)})".replace("(vars )", "(vars)"))
        events = " ".join(str(ev) for ev in r.trace)
        lines.append(f"    (trace {events}))")
    lines[-1] += ")"
    return "\n".join(lines)


def _skeleton_clauses(k: Skeleton) -> list[str]:
    out = [f"(vars {format_vars(k.vars)})".replace("(vars )", "(vars)")]
    for inst in k.instances:
        binds = " ".join(f"({x.name} {format_term(inst.subst[x])})"
                         for x in inst.role.prefix_vars(inst.height) if x in inst.subst)
        out.append(f"(defstrand {inst.role.name} {inst.height}" + (f" {binds})" if binds else ")"))
    if k.orderings:
        edges = " ".join(f"(({a[0]} {a[1]}) ({b[0]} {b[1]}))"
                         for a, b in sorted((tuple(a), tuple(b)) for a, b in k.orderings))
        out.append(f"(precedes {edges})")
    if k.non:
        out.append("(non-orig " + " ".join(format_term(t) for t in k.non) + ")")
    if k.uniq:
        out.append("(uniq-orig " + " ".join(format_term(t) for t in k.uniq) + ")")
    return out


def format_skeleton(k: Skeleton) -> str:
    return f"(defskeleton {k.protocol.name}\n  " + "\n  ".join(_skeleton_clauses(k)) + ")"


def format_analysis(sa: ShapeAnalysis) -> str:
    lines = [f"(defanalysis\n  (pov {sa.pov.protocol.name}\n    "
             + "\n    ".join(_skeleton_clauses(sa.pov)) + ")"]
    for d in sa.homomorphisms:
        clauses = _skeleton_clauses(d.target)
        strands = " ".join(str(j) for j in d.phi)
        binds = " ".join(f"({x.name} {format_term(d.sigma.get(x, x))})" for x in sa.pov.vars)
        clauses.append(f"(maps ({strands}) ({binds}))")
        lines.append(f"  (shape {d.target.protocol.name}\n    " + "\n    ".join(clauses) + ")")
    return "\n".join(lines) + ")"


def format_atom(a: Atom) -> str:
    from .logic import format_atom as _fa
    return _fa(a)


def _format_conj(atoms: Sequence[Atom], indent: str) -> str:
    if not atoms:
        return "(and)"
    return "(and " + f"\n{indent}".join(format_atom(a) for a in atoms) + ")"


def format_goal(g: Goal) -> str:
    """Print a goal or sentence as a ``defgoal`` form."""
    head = f"(defgoal {g.protocol.name}\n  (forall ({format_vars(g.vars)})\n    (implies\n"
    hyp = "      " + _format_conj(g.hypothesis, "        ")
    if not g.disjuncts:
        concl = "      (false)"
    else:
        parts = []
        for d in g.disjuncts:
            body = _format_conj(d.atoms, "            ")
            parts.append(f"(exists ({format_vars(d.vars)})\n          {body})")
        concl = "      (or " + "\n        ".join(parts) + ")"
    return head + hyp + "\n" + concl + ")))"


def format_formula(f: Formula) -> str:
    c = f.conjunction
    return (f"(defformula {f.protocol.name} (vars {format_vars(c.vars)})\n  "
            + _format_conj(c.atoms, "    ") + ")")
