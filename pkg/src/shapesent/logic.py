"""Skeleton formulas, shape analysis sentences, and their satisfaction.

Formulas are conjunctions of atomic formulas over a protocol.  A skeleton
serves as a model: natural-number variables denote strands or event
indices, message variables denote terms over the skeleton's variables.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence, Union

from .algebra import (
    ATOMIC_SORTS, Nat, Sort, SortError, Term, Var, apply, canonicalize,
    format_term, match, sort_leq, sort_of, variables,
)
from .homomorphism import Homomorphism, verify
from .skeleton import (
    Instance, Node, Protocol, Role, Skeleton, check_wellformed,
    elaboration_check,
)


class ModeError(ValueError):
    """A formula whose satisfying assignments cannot be enumerated finitely."""


class UnassignedVariable(KeyError):
    pass


class CharacteristicError(ValueError):
    pass


class CharacterizationViolation(AssertionError):
    pass


# ---------------------------------------------------------------- atoms

def _require_nat(t: Term, what: str) -> None:
    if sort_of(t) is not Sort.NAT:
        raise SortError(f"{what} must be a natural number, got {format_term(t)}")


@dataclass(frozen=True)
class Progress:
    """Strand ``strand`` is compatible with ``role`` up to ``height`` and
    binds role variable ``var`` to ``msg``."""
    role: Role
    height: int
    var: Var
    strand: Term
    msg: Term

    def __post_init__(self):
        if not 1 <= self.height <= len(self.role.trace):
            raise SortError(f"height {self.height} out of range for role {self.role.name}")
        if self.var not in self.role.prefix_vars(self.height):
            raise SortError(
                f"{self.var.name} does not occur in role {self.role.name} up to height {self.height}")
        _require_nat(self.strand, "strand argument")
        if not sort_leq(sort_of(self.msg), self.var.sort):
            raise SortError(
                f"{format_term(self.msg)} does not have the sort {self.var.sort} of {self.var.name}")

    @property
    def terms(self) -> tuple[Term, ...]:
        return (self.strand, self.msg)


@dataclass(frozen=True)
class Prec:
    strand: Term
    index: Term
    later_strand: Term
    later_index: Term

    def __post_init__(self):
        for t in self.terms:
            _require_nat(t, "prec argument")

    @property
    def terms(self) -> tuple[Term, ...]:
        return (self.strand, self.index, self.later_strand, self.later_index)


def _require_atomic(t: Term, what: str) -> None:
    if sort_of(t) not in ATOMIC_SORTS:
        raise SortError(f"{what} argument {format_term(t)} is not of an atomic sort")


@dataclass(frozen=True)
class Non:
    term: Term

    def __post_init__(self):
        _require_atomic(self.term, "non")

    @property
    def terms(self) -> tuple[Term, ...]:
        return (self.term,)


@dataclass(frozen=True)
class Uniq:
    term: Term

    def __post_init__(self):
        _require_atomic(self.term, "uniq")

    @property
    def terms(self) -> tuple[Term, ...]:
        return (self.term,)


@dataclass(frozen=True)
class Orig:
    term: Term
    strand: Term
    index: Term

    def __post_init__(self):
        _require_atomic(self.term, "orig")
        _require_nat(self.strand, "orig strand")
        _require_nat(self.index, "orig index")

    @property
    def terms(self) -> tuple[Term, ...]:
        return (self.term, self.strand, self.index)


@dataclass(frozen=True)
class Equals:
    left: Term
    right: Term

    def __post_init__(self):
        a, b = sort_of(self.left), sort_of(self.right)
        if not (sort_leq(a, b) or sort_leq(b, a)):
            raise SortError(
                f"cannot equate {format_term(self.left)}:{a} with {format_term(self.right)}:{b}")

    @property
    def terms(self) -> tuple[Term, ...]:
        return (self.left, self.right)


@dataclass(frozen=True)
class FalseAtom:
    @property
    def terms(self) -> tuple[Term, ...]:
        return ()


Atom = Union[Progress, Prec, Non, Uniq, Orig, Equals, FalseAtom]


def atom_vars(a: Atom) -> list[Var]:
    """Free variables of an atom; the role variable of a progress atom is not free."""
    out: dict[Var, None] = {}
    for t in a.terms:
        for v in variables(t):
            out[v] = None
    return list(out)


@dataclass(frozen=True)
class Conjunction:
    vars: tuple[Var, ...]
    atoms: tuple[Atom, ...]

    def free_vars(self) -> list[Var]:
        out: dict[Var, None] = {}
        for a in self.atoms:
            for v in atom_vars(a):
                out[v] = None
        return list(out)


@dataclass(frozen=True)
class Existential:
    vars: tuple[Var, ...]
    atoms: tuple[Atom, ...]


@dataclass(frozen=True)
class Goal:
    """``forall vars (hypothesis implies disjunct_1 or ... or disjunct_n)``.

    With no disjuncts the conclusion is false, which expresses secrecy.
    """
    protocol: Protocol
    vars: tuple[Var, ...]
    hypothesis: tuple[Atom, ...]
    disjuncts: tuple[Existential, ...] = ()

    def __post_init__(self):
        univ = set(self.vars)
        for v in Conjunction(self.vars, self.hypothesis).free_vars():
            if v not in univ:
                raise SortError(f"hypothesis variable {v.name} is not universally quantified")
        for d in self.disjuncts:
            scope = univ | set(d.vars)
            for v in Conjunction(d.vars, d.atoms).free_vars():
                if v not in scope:
                    raise SortError(f"conclusion variable {v.name} is not bound")

    @property
    def hypothesis_conjunction(self) -> Conjunction:
        return Conjunction(self.vars, self.hypothesis)


# A shape analysis sentence has exactly the shape of a goal.
Sentence = Goal


# ---------------------------------------------------------------- semantics

Value = Union[int, Term]
Assignment = Mapping[Var, Value]


@functools.lru_cache(maxsize=8192)
def _role_binding(k: Skeleton, strand: int, role: Role, height: int) -> Optional[dict]:
    trace = k.instances[strand].trace
    if height > len(trace):
        return None
    found = elaboration_check(trace[:height], role)
    return found[0] if found else None


def _nat_value(t: Term, alpha: Assignment) -> Optional[int]:
    if isinstance(t, Nat):
        return t.value
    return alpha.get(t)


def _is_ground(t: Term, alpha: Assignment) -> bool:
    return all(v in alpha for v in variables(t))


def _value(t: Term, alpha: Assignment) -> Value:
    for v in variables(t):
        if v not in alpha:
            raise UnassignedVariable(v.name)
    if sort_of(t) is Sort.NAT:
        return _nat_value(t, alpha)
    return apply(alpha, t)


def eval_atom(k: Skeleton, alpha: Assignment, a: Atom) -> bool:
    if isinstance(a, FalseAtom):
        return False
    if isinstance(a, Progress):
        s = _value(a.strand, alpha)
        msg = _value(a.msg, alpha)
        if not isinstance(s, int) or not 0 <= s < len(k.instances):
            return False
        binding = _role_binding(k, s, a.role, a.height)
        return binding is not None and binding.get(a.var) == msg
    if isinstance(a, Prec):
        s0, i0, s1, i1 = (_value(t, alpha) for t in a.terms)
        return (Node(s0, i0), Node(s1, i1)) in k.effective_order
    if isinstance(a, Non):
        return _value(a.term, alpha) in k.non
    if isinstance(a, Uniq):
        return _value(a.term, alpha) in k.uniq
    if isinstance(a, Orig):
        t = _value(a.term, alpha)
        n = Node(_value(a.strand, alpha), _value(a.index, alpha))
        return t in k.uniq and n in k.origination_nodes(t)
    if isinstance(a, Equals):
        return _value(a.left, alpha) == _value(a.right, alpha)
    raise TypeError(f"not an atom: {a!r}")


def satisfies(k: Skeleton, alpha: Assignment, atoms: Sequence[Atom]) -> bool:
    return all(eval_atom(k, alpha, a) for a in atoms)


def _atoms_of(c) -> tuple[Atom, ...]:
    return tuple(c.atoms) if hasattr(c, "atoms") else tuple(c)


def check_moded(atoms: Sequence[Atom], bound=()) -> None:
    """Raise ModeError unless every message variable can be grounded.

    A message variable is grounded by the message argument of a progress
    atom, by the argument of a non, uniq or orig atom (finite sets), or by
    an equation whose other side is grounded.
    """
    grounded = set(bound)
    for a in atoms:
        if isinstance(a, Progress):
            grounded.update(variables(a.msg))
        elif isinstance(a, (Non, Uniq, Orig)):
            grounded.update(variables(a.term))
    changed = True
    while changed:
        changed = False
        for a in atoms:
            if isinstance(a, Equals):
                lv, rv = set(variables(a.left)), set(variables(a.right))
                for src, dst in ((lv, rv), (rv, lv)):
                    if src <= grounded and not dst <= grounded:
                        grounded |= dst
                        changed = True
    for a in atoms:
        for v in atom_vars(a):
            if v.sort is not Sort.NAT and v not in grounded:
                raise ModeError(f"message variable {v.name} is not grounded by any progress atom")


def _nat_domain(k: Skeleton) -> range:
    return range(max(len(k.instances), max(inst.height for inst in k.instances)))


def _extend(pattern: Term, value: Value, alpha: dict) -> Optional[dict]:
    if sort_of(pattern) is Sort.NAT:
        if isinstance(pattern, Nat):
            return alpha if pattern.value == value else None
        if pattern in alpha:
            return alpha if alpha[pattern] == value else None
        if not isinstance(value, int):
            return None
        out = dict(alpha)
        out[pattern] = value
        return out
    if isinstance(value, int):
        return None
    found = match(pattern, value, alpha)
    return found[0] if found else None


def _search(k: Skeleton, pending: list, alpha: dict) -> Iterator[dict]:
    if not pending:
        yield alpha
        return

    # 1. fully ground atoms are plain checks
    for idx, a in enumerate(pending):
        if all(v in alpha for v in atom_vars(a)):
            if eval_atom(k, alpha, a):
                yield from _search(k, pending[:idx] + pending[idx + 1:], alpha)
            return

    rest = lambda idx: pending[:idx] + pending[idx + 1:]

    # 2. progress atoms whose strand is known determine their message
    for idx, a in enumerate(pending):
        if isinstance(a, Progress) and _is_ground(a.strand, alpha):
            s = _value(a.strand, alpha)
            if not 0 <= s < len(k.instances):
                return
            binding = _role_binding(k, s, a.role, a.height)
            if binding is None:
                return
            beta = _extend(a.msg, binding[a.var], alpha)
            if beta is not None:
                yield from _search(k, rest(idx), beta)
            return

    # 3. equations with one ground side
    for idx, a in enumerate(pending):
        if isinstance(a, Equals):
            for known, unknown in ((a.left, a.right), (a.right, a.left)):
                if _is_ground(known, alpha):
                    beta = _extend(unknown, _value(known, alpha), alpha)
                    if beta is not None:
                        yield from _search(k, rest(idx), beta)
                    return

    # 4. choose a strand for a progress atom
    for a in pending:
        if isinstance(a, Progress):
            for s in range(len(k.instances)):
                beta = _extend(a.strand, s, alpha)
                if beta is not None:
                    yield from _search(k, pending, beta)
            return

    # 5. origination assumptions are finite sets
    for idx, a in enumerate(pending):
        if isinstance(a, (Non, Uniq, Orig)) and not _is_ground(a.term, alpha):
            pool = k.non if isinstance(a, Non) else k.uniq
            for cand in pool:
                beta = _extend(a.term, cand, alpha)
                if beta is not None:
                    yield from _search(k, pending, beta)
            return

    # 6. remaining natural-number variables range over a finite domain
    for a in pending:
        for v in atom_vars(a):
            if v.sort is Sort.NAT and v not in alpha:
                for n in _nat_domain(k):
                    yield from _search(k, pending, {**alpha, v: n})
                return

    raise ModeError("cannot ground variables of " + ", ".join(
        format_atom(a) for a in pending))


def _freeze(alpha: Assignment) -> tuple:
    return tuple(sorted(((v.name, v.sort.value), str(val)) for v, val in alpha.items()))


def enumerate_assignments(k: Skeleton, conj, seed: Optional[Assignment] = None) -> list[dict]:
    """Every extension of ``seed`` to the conjunction's free variables
    that satisfies all of its atoms in ``k``."""
    atoms = _atoms_of(conj)
    seed = dict(seed or {})
    check_moded(atoms, bound=seed)
    results, seen = [], set()
    for alpha in _search(k, list(atoms), seed):
        key = _freeze(alpha)
        if key not in seen:
            seen.add(key)
            results.append(alpha)
    return results


# ---------------------------------------------------------------- extraction

def fresh_name(base: str, taken) -> str:
    if base not in taken:
        return base
    n = 1
    while f"{base}{n}" in taken:
        n += 1
    return f"{base}{n}"


def strand_variables(count: int, start: int, taken) -> list[Var]:
    """``count`` fresh strand variables z<start>, z<start+1>, ... avoiding ``taken``."""
    taken = set(taken)
    out = []
    n = start
    while len(out) < count:
        name = f"z{n}"
        n += 1
        if name in taken:
            continue
        taken.add(name)
        out.append(Var(name, Sort.NAT))
    return out


def skeleton_formula(k: Skeleton, strand_vars: Optional[Sequence[Var]] = None,
                     full_order: bool = False) -> tuple[tuple[Var, ...], Conjunction]:
    """The variable set and skeleton formula characterizing ``k``.

    Strand variables default to z0, z1, ... chosen fresh for ``k``.  With
    ``full_order`` every pair of the effective node order is asserted
    instead of the stored communication edges only.
    """
    if strand_vars is None:
        strand_vars = strand_variables(len(k.instances), 0, {v.name for v in k.vars})
    z = list(strand_vars)
    if len(z) != len(k.instances):
        raise ValueError("need one strand variable per strand")
    atoms: list[Atom] = []
    for s, inst in enumerate(k.instances):
        for x in inst.role.prefix_vars(inst.height):
            if x in inst.subst:
                atoms.append(Progress(inst.role, inst.height, x, z[s], inst.subst[x]))
    edges = k.effective_order if full_order else k.orderings
    for a, b in sorted((tuple(a), tuple(b)) for a, b in edges):
        atoms.append(Prec(z[a[0]], Nat(a[1]), z[b[0]], Nat(b[1])))
    atoms.extend(Non(t) for t in k.non)
    atoms.extend(Uniq(t) for t in k.uniq)
    for t in k.uniq:
        for s, i in sorted(k.origination_nodes(t)):
            atoms.append(Orig(t, z[s], Nat(i)))
    y = tuple(k.vars) + tuple(z)
    return y, Conjunction(y, tuple(atoms))


def rename_skeleton(k: Skeleton, renaming: Mapping[Var, Var]) -> Skeleton:
    def ren(t):
        return apply(renaming, t)
    instances = tuple(
        Instance(inst.role, inst.height, {x: ren(t) for x, t in inst.subst.items()})
        for inst in k.instances)
    return Skeleton(
        protocol=k.protocol,
        vars=tuple(renaming.get(v, v) for v in k.vars),
        instances=instances,
        orderings=k.orderings,
        non=tuple(ren(t) for t in k.non),
        uniq=tuple(ren(t) for t in k.uniq),
    )


@dataclass(frozen=True, eq=False)
class ShapeAnalysis:
    """A point-of-view skeleton and homomorphisms onto each of its shapes."""
    pov: Skeleton
    homomorphisms: tuple[Homomorphism, ...] = ()

    def __post_init__(self):
        for i, delta in enumerate(self.homomorphisms, 1):
            if delta.source is not self.pov and not delta.source.same_as(self.pov):
                raise ValueError(f"shape {i}: homomorphism does not start at the point of view")
            if delta.target.protocol != self.pov.protocol:
                raise ValueError(f"shape {i}: protocol differs from the point of view")

    @property
    def shapes(self) -> tuple[Skeleton, ...]:
        return tuple(d.target for d in self.homomorphisms)

    @property
    def protocol(self) -> Protocol:
        return self.pov.protocol


def shape_analysis_sentence(sa: ShapeAnalysis, full_order: bool = False) -> Sentence:
    k0 = sa.pov
    z0 = strand_variables(len(k0.instances), 0, {v.name for v in k0.vars})
    x0, phi0 = skeleton_formula(k0, z0, full_order)
    pov_names = {v.name for v in x0}
    next_z = len(z0)
    disjuncts = []
    for i, delta in enumerate(sa.homomorphisms, 1):
        ki = delta.target
        own = {v.name for v in ki.vars}
        taken = pov_names | own
        renaming: dict[Var, Var] = {}
        for v in ki.vars:
            if v.name in pov_names:
                name = f"{v.name}_{i}"
                n = 1
                while name in taken:
                    name = f"{v.name}_{i}_{n}"
                    n += 1
                taken.add(name)
                renaming[v] = Var(name, v.sort)
        ki_renamed = rename_skeleton(ki, renaming)
        zi = strand_variables(len(ki.instances), next_z, taken)
        next_z = int(zi[-1].name[1:]) + 1 if zi else next_z
        xi, phii = skeleton_formula(ki_renamed, zi, full_order)
        delta_atoms: list[Atom] = [Equals(z0[j], zi[delta.phi[j]])
                                   for j in range(len(k0.instances))]
        for x in k0.vars:
            delta_atoms.append(Equals(x, apply(renaming, delta.sigma.get(x, x))))
        disjuncts.append(Existential(xi, tuple(delta_atoms) + phii.atoms))
    return Goal(k0.protocol, x0, phi0.atoms, tuple(disjuncts))


# ---------------------------------------------------------------- goals

class Outcome(enum.Enum):
    ACHIEVED = "achieved"
    COUNTEREXAMPLE = "counterexample"


COMPLETENESS_CAVEAT = (
    "sound only if the shape analysis is complete and its shapes are realized")


@dataclass(frozen=True)
class Counterexample:
    shape: int
    assignment: dict
    explanations: tuple[str, ...] = ()


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    counterexamples: tuple[Counterexample, ...] = ()
    checked: int = 0
    caveat: str = COMPLETENESS_CAVEAT

    @property
    def achieved(self) -> bool:
        return self.outcome is Outcome.ACHIEVED


def format_assignment(alpha: Assignment) -> str:
    parts = []
    for v, val in alpha.items():
        shown = str(val) if isinstance(val, int) else format_term(val)
        parts.append(f"{v.name} -> {shown}")
    return "{" + ", ".join(parts) + "}"


def _explain_disjunct(k: Skeleton, j: int, d: Existential, alpha: Assignment) -> str:
    head = "exists " + " ".join(v.name for v in d.vars) + ". " if d.vars else ""
    lines = [f"disjunct {j}: {head}" + " & ".join(format_atom(a) for a in d.atoms)
             + " is unsatisfiable"]
    for a in d.atoms:
        if not isinstance(a, Progress) or not _is_ground(a.msg, alpha):
            continue
        wanted = _value(a.msg, alpha)
        for s in range(len(k.instances)):
            binding = _role_binding(k, s, a.role, a.height)
            if binding is None:
                continue
            got = binding[a.var]
            if got != wanted:
                lines.append(
                    f"  strand {s} ({a.role.name}) binds {a.var.name} to {format_term(got)}, "
                    f"not {format_term(wanted)}")
        if not any(_role_binding(k, s, a.role, a.height) is not None
                   for s in range(len(k.instances))):
            lines.append(f"  no strand is compatible with {a.role.name} at height {a.height}")
    return "\n".join(lines)


def check_goal(sa: ShapeAnalysis, goal: Goal) -> Verdict:
    """Decide the goal model-theoretically over the shapes of ``sa``.

    Counterexamples come sorted by shape index, then enumeration order.
    """
    if goal.protocol != sa.protocol:
        raise ValueError("goal and analysis use different protocols")
    check_moded(goal.hypothesis)
    counterexamples = []
    checked = 0
    for i, shape in enumerate(sa.shapes, 1):
        for alpha in enumerate_assignments(shape, goal.hypothesis):
            checked += 1
            if any(enumerate_assignments(shape, d.atoms, alpha) for d in goal.disjuncts):
                continue
            notes = tuple(_explain_disjunct(shape, j, d, alpha)
                          for j, d in enumerate(goal.disjuncts, 1))
            if not goal.disjuncts:
                notes = ("the conclusion is false",)
            counterexamples.append(Counterexample(i, alpha, notes))
    if counterexamples:
        return Verdict(Outcome.COUNTEREXAMPLE, tuple(counterexamples), checked)
    return Verdict(Outcome.ACHIEVED, (), checked)


def characteristic_skeleton(vars: Sequence[Var], hypothesis, protocol: Protocol) -> Skeleton:
    """Build a skeleton whose homomorphic images are exactly the models of
    the hypothesis."""
    atoms = _atoms_of(hypothesis)
    check_moded(atoms)
    strands: dict[Var, list[Progress]] = {}
    for a in atoms:
        if isinstance(a, FalseAtom):
            raise CharacteristicError("hypothesis contains false")
        if isinstance(a, Equals):
            raise CharacteristicError("equations are not supported in hypotheses")
        if isinstance(a, Progress):
            if not isinstance(a.strand, Var):
                raise CharacteristicError(f"strand argument {a.strand} must be a variable")
            strands.setdefault(a.strand, []).append(a)
    for a in atoms:
        for v in atom_vars(a):
            if v.sort is Sort.NAT and v not in strands:
                raise CharacteristicError(f"{v.name} does not name a strand")
    order = list(strands)
    index = {z: s for s, z in enumerate(order)}

    used_names = {v.name for v in vars} | {v.name for a in atoms for v in atom_vars(a)}
    instances = []
    extra_vars: list[Var] = []
    for z in order:
        progress = strands[z]
        roles = {p.role for p in progress}
        if len(roles) > 1:
            raise CharacteristicError(
                f"{z.name} is used with roles " + ", ".join(sorted(r.name for r in roles)))
        role = progress[0].role
        height = max(p.height for p in progress)
        subst: dict[Var, Term] = {}
        for p in progress:
            prior = subst.get(p.var)
            if prior is not None and prior != p.msg:
                raise CharacteristicError(
                    f"{z.name}: {role.name} variable {p.var.name} bound to both "
                    f"{format_term(prior)} and {format_term(p.msg)}")
            subst[p.var] = p.msg
        for x in role.prefix_vars(height):
            if x not in subst:
                fresh = Var(fresh_name(x.name, used_names), x.sort)
                used_names.add(fresh.name)
                extra_vars.append(fresh)
                subst[x] = fresh
        instances.append(Instance(role, height, subst))

    orderings = set()
    non, uniq = [], []
    for a in atoms:
        if isinstance(a, Prec):
            s0, s1 = index[a.strand], index[a.later_strand]
            if not (isinstance(a.index, Nat) and isinstance(a.later_index, Nat)):
                raise CharacteristicError("prec indices must be literals")
            orderings.add((Node(s0, a.index.value), Node(s1, a.later_index.value)))
        elif isinstance(a, Non):
            non.append(a.term)
        elif isinstance(a, Uniq):
            uniq.append(a.term)

    mentioned: dict[Var, None] = {}
    for inst in instances:
        for t in inst.subst.values():
            for v in variables(t):
                mentioned[v] = None
    for t in non + uniq:
        for v in variables(t):
            mentioned[v] = None
    k = Skeleton(
        protocol=protocol,
        vars=tuple(mentioned),
        instances=tuple(instances),
        orderings=frozenset(orderings),
        non=tuple(dict.fromkeys(non)),
        uniq=tuple(dict.fromkeys(uniq)),
    )
    problems = check_wellformed(k)
    if problems:
        raise CharacteristicError("hypothesis yields an ill-formed skeleton: " + "; ".join(problems))

    asserted = set()
    for a in atoms:
        if isinstance(a, Orig):
            if not isinstance(a.index, Nat):
                raise CharacteristicError("orig index must be a literal")
            node = Node(index[a.strand], a.index.value)
            if a.term not in k.uniq or node not in k.origination_nodes(a.term):
                raise CharacteristicError(
                    f"{format_term(a.term)} does not originate at {tuple(node)}")
            asserted.add((a.term, node))
    for t in k.uniq:
        for n in k.origination_nodes(t):
            if (t, n) not in asserted:
                raise CharacteristicError(
                    f"{format_term(t)} originates at {tuple(n)} but no orig atom says so")
    return k


def assignment_from_homomorphism(k0: Skeleton, delta: Homomorphism,
                                 strand_vars: Sequence[Var]) -> dict:
    alpha: dict = {z: delta.phi[j] for j, z in enumerate(strand_vars)}
    for x in k0.vars:
        alpha[x] = delta.sigma.get(x, x)
    return alpha


def characterization_check(k0: Skeleton, k: Skeleton, delta: Optional[Homomorphism] = None) -> bool:
    """Whether the skeleton formula of ``k0`` is satisfiable in ``k``.

    Each witness is turned into a homomorphism and verified.  Given a
    homomorphism instead, the induced assignment is checked to satisfy the
    formula.
    """
    y, phi = skeleton_formula(k0)
    z = [v for v in y if v.sort is Sort.NAT]
    if delta is not None:
        alpha = assignment_from_homomorphism(k0, delta, z)
        for a in phi.atoms:
            if not eval_atom(k, alpha, a):
                raise CharacterizationViolation(
                    f"homomorphism-induced assignment falsifies {format_atom(a)}")
        return True
    found = enumerate_assignments(k, phi)
    for alpha in found:
        strand_map = [alpha[v] for v in z]
        sigma = {x: alpha[x] for x in k0.vars}
        failures = verify(k0, k, strand_map, sigma)
        if failures:
            raise CharacterizationViolation(
                "satisfying assignment is not a homomorphism: "
                + "; ".join(str(f) for f in failures))
    return bool(found)


# conventional name for the check above
theorem1_check = characterization_check


def homomorphism_from_assignment(k0: Skeleton, k: Skeleton, alpha: Assignment) -> Homomorphism:
    y, _ = skeleton_formula(k0)
    z = [v for v in y if v.sort is Sort.NAT]
    return Homomorphism.create(k0, k, [alpha[v] for v in z], {x: alpha[x] for x in k0.vars})


# ---------------------------------------------------------------- display

def format_atom(a: Atom) -> str:
    def f(t):
        return format_term(t)
    if isinstance(a, Progress):
        return f"(p {a.role.name} {a.height} {a.var.name} {f(a.strand)} {f(a.msg)})"
    if isinstance(a, Prec):
        return "(prec " + " ".join(f(t) for t in a.terms) + ")"
    if isinstance(a, Non):
        return f"(non {f(a.term)})"
    if isinstance(a, Uniq):
        return f"(uniq {f(a.term)})"
    if isinstance(a, Orig):
        return "(orig " + " ".join(f(t) for t in a.terms) + ")"
    if isinstance(a, Equals):
        return f"(= {f(a.left)} {f(a.right)})"
    if isinstance(a, FalseAtom):
        return "(false)"
    raise TypeError(f"not an atom: {a!r}")
