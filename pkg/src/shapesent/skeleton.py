"""Protocols, roles, instances and skeletons."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Optional

from .algebra import (
    ATOMIC_SORTS, MESSAGE_SORTS, SortError, Substitution, Term, Var, apply,
    canonicalize, carried_by, format_term, is_canonical, make_varset, match,
    sort_leq, sort_of, variables,
)


class WellFormednessError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class Direction(enum.Enum):
    SEND = "send"
    RECV = "recv"


@dataclass(frozen=True)
class Event:
    direction: Direction
    message: Term

    def __str__(self) -> str:
        return f"({self.direction.value} {format_term(self.message)})"

    @property
    def sign(self) -> str:
        return "+" if self.direction is Direction.SEND else "-"


def send(t: Term) -> Event:
    return Event(Direction.SEND, t)


def recv(t: Term) -> Event:
    return Event(Direction.RECV, t)


Trace = tuple[Event, ...]


class Node(NamedTuple):
    strand: int
    index: int


@dataclass(frozen=True)
class Role:
    name: str
    vars: tuple[Var, ...]
    trace: Trace

    def __post_init__(self):
        if not self.trace:
            raise WellFormednessError([f"role {self.name} has an empty trace"])
        declared = set(make_varset(self.vars))
        for ev in self.trace:
            if sort_of(ev.message) not in MESSAGE_SORTS or not is_canonical(ev.message):
                raise WellFormednessError(
                    [f"role {self.name}: event {ev} is not a canonical message"])
            for v in variables(ev.message):
                if v not in declared:
                    raise WellFormednessError(
                        [f"role {self.name}: variable {v.name} is not declared"])

    def __len__(self) -> int:
        return len(self.trace)

    def prefix_vars(self, height: int) -> list[Var]:
        """Declared variables occurring in the first ``height`` events, in declaration order."""
        seen = set()
        for ev in self.trace[:height]:
            seen.update(variables(ev.message))
        return [v for v in self.vars if v in seen]

    def var(self, name: str) -> Var:
        for v in self.vars:
            if v.name == name:
                return v
        raise KeyError(f"role {self.name} has no variable {name}")


@dataclass(frozen=True)
class Protocol:
    name: str
    roles: tuple[Role, ...]

    def __post_init__(self):
        names = [r.name for r in self.roles]
        if len(set(names)) != len(names):
            raise WellFormednessError([f"protocol {self.name}: duplicate role names"])

    def role(self, name: str) -> Role:
        for r in self.roles:
            if r.name == name:
                return r
        raise KeyError(f"protocol {self.name} has no role {name}")


@dataclass(frozen=True, eq=False)
class Instance:
    role: Role
    height: int
    subst: Mapping[Var, Term]

    def __eq__(self, other):
        return (isinstance(other, Instance) and self.role == other.role
                and self.height == other.height and dict(self.subst) == dict(other.subst))

    def __hash__(self):
        return hash((self.role.name, self.height))

    @cached_property
    def trace(self) -> Trace:
        return instance_trace(self)


def instance_trace(inst: Instance) -> Trace:
    if not 1 <= inst.height <= len(inst.role.trace):
        raise ValueError(
            f"height {inst.height} out of range for role {inst.role.name} "
            f"of length {len(inst.role.trace)}")
    return tuple(Event(ev.direction, apply(inst.subst, ev.message))
                 for ev in inst.role.trace[:inst.height])


def originates_in(t: Term, trace: Iterable[Event]) -> Optional[int]:
    """Index of the event where ``t`` originates, if it does."""
    for i, ev in enumerate(trace):
        if carried_by(t, ev.message):
            return i if ev.direction is Direction.SEND else None
    return None


def transitive_closure(pairs: Iterable[tuple]) -> set[tuple]:
    succ: dict = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
    closure = set()
    for start in list(succ):
        stack = list(succ[start])
        seen = set()
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            closure.add((start, n))
            stack.extend(succ.get(n, ()))
    return closure


@dataclass(frozen=True, eq=False)
class Skeleton:
    """A strand space with node ordering and origination assumptions.

    ``orderings`` holds only communication edges between strands; strand
    succession is always implied.
    """

    protocol: Protocol
    vars: tuple[Var, ...]
    instances: tuple[Instance, ...]
    orderings: frozenset = field(default_factory=frozenset)
    non: tuple[Term, ...] = ()
    uniq: tuple[Term, ...] = ()

    @property
    def traces(self) -> tuple[Trace, ...]:
        return tuple(inst.trace for inst in self.instances)

    def __len__(self) -> int:
        return len(self.instances)

    def nodes(self) -> list[Node]:
        return [Node(s, i) for s, inst in enumerate(self.instances)
                for i in range(inst.height)]

    def has_node(self, n) -> bool:
        s, i = n
        return 0 <= s < len(self.instances) and 0 <= i < self.instances[s].height

    def event(self, n) -> Event:
        return self.instances[n[0]].trace[n[1]]

    @cached_property
    def effective_order(self) -> frozenset:
        return effective_order(self)

    def precedes(self, n0, n1) -> bool:
        return (tuple(n0), tuple(n1)) in self.effective_order

    def origination_nodes(self, t: Term) -> set[Node]:
        return origination_nodes(self, t)

    def same_as(self, other: "Skeleton") -> bool:
        return (self.protocol == other.protocol
                and set(self.vars) == set(other.vars)
                and self.instances == other.instances
                and self.orderings == other.orderings
                and set(self.non) == set(other.non)
                and set(self.uniq) == set(other.uniq))


def origination_nodes(k: Skeleton, t: Term) -> set[Node]:
    result = set()
    for s, tr in enumerate(k.traces):
        i = originates_in(t, tr)
        if i is not None:
            result.add(Node(s, i))
    return result


class CycleError(WellFormednessError):
    pass


def effective_order(k: Skeleton) -> frozenset:
    pairs = {(Node(*a), Node(*b)) for a, b in k.orderings}
    for s, inst in enumerate(k.instances):
        for i in range(inst.height - 1):
            pairs.add((Node(s, i), Node(s, i + 1)))
    closure = transitive_closure(pairs)
    loops = sorted(a for a, b in closure if a == b)
    if loops:
        raise CycleError([f"node ordering has a cycle through {loops[0]}"])
    return frozenset(closure)


def check_wellformed(k: Skeleton) -> list[str]:
    """List every violated skeleton invariant; empty means well-formed."""
    problems: list[str] = []
    try:
        declared = set(make_varset(k.vars))
    except SortError as e:
        return [str(e)]
    if not k.instances:
        problems.append("skeleton has no strands")
    for s, inst in enumerate(k.instances):
        if inst.role not in k.protocol.roles:
            problems.append(f"strand {s}: role {inst.role.name} is not in protocol {k.protocol.name}")
        if not 1 <= inst.height <= len(inst.role.trace):
            problems.append(f"strand {s}: height {inst.height} out of range for role {inst.role.name}")
            continue
        prefix = set(inst.role.prefix_vars(inst.height))
        for x, t in inst.subst.items():
            if x not in prefix:
                problems.append(f"strand {s}: {x.name} does not occur in {inst.role.name} up to height {inst.height}")
            if not sort_leq(sort_of(t), x.sort):
                problems.append(f"strand {s}: {x.name}:{x.sort} bound to {format_term(t)} of sort {sort_of(t)}")
            if not is_canonical(t):
                problems.append(f"strand {s}: {format_term(t)} is not canonical")
            for v in variables(t):
                if v not in declared:
                    problems.append(f"strand {s}: variable {v.name} is not declared in the skeleton")
        for x in prefix:
            if x not in inst.subst:
                problems.append(f"strand {s}: role variable {x.name} is not instantiated")
    if problems:
        return problems

    used = set()
    for tr in k.traces:
        for ev in tr:
            used.update(variables(ev.message))
    for t in (*k.non, *k.uniq):
        used.update(variables(t))
    for v in k.vars:
        if v not in used:
            problems.append(f"variable {v.name} is declared but never used")

    for a, b in k.orderings:
        for n in (a, b):
            if not k.has_node(n):
                problems.append(f"ordering mentions nonexistent node {tuple(n)}")
        if a[0] == b[0] and k.has_node(a) and k.has_node(b):
            problems.append(f"ordering {tuple(a)} < {tuple(b)} is within one strand")
    if problems:
        return problems
    try:
        order = k.effective_order
    except CycleError as e:
        problems.extend(e.violations)
        order = None

    for label, terms in (("non-orig", k.non), ("uniq-orig", k.uniq)):
        for t in terms:
            if sort_of(t) not in ATOMIC_SORTS or canonicalize(t) != t:
                problems.append(f"{label} {format_term(t)} is not an atom")
            for v in variables(t):
                if v not in declared:
                    problems.append(f"{label} {format_term(t)}: variable {v.name} is not declared")
    for t in k.non:
        for n in sorted(origination_nodes(k, t)):
            problems.append(f"non-originating {format_term(t)} originates at {tuple(n)}")
    for t in k.uniq:
        orig = sorted(origination_nodes(k, t))
        if len(orig) > 1:
            problems.append(
                f"uniquely originating {format_term(t)} originates at "
                + ", ".join(str(tuple(n)) for n in orig))
        elif orig and order is not None:
            n0 = orig[0]
            for n in k.nodes():
                if n != n0 and carried_by(t, k.event(n).message) and (n0, n) not in order:
                    problems.append(
                        f"{format_term(t)} originates at {tuple(n0)} but node {tuple(n)} "
                        f"carrying it is not ordered after it")
    return problems


def validate(k: Skeleton) -> Skeleton:
    problems = check_wellformed(k)
    if problems:
        raise WellFormednessError(problems)
    return k


def elaboration_check(trace, role: Role) -> list[dict[Var, Term]]:
    """Substitutions instantiating a prefix of ``role`` to exactly ``trace``."""
    trace = tuple(trace)
    if len(trace) > len(role.trace):
        return []
    subst: list[dict] = [{}]
    for actual, pattern in zip(trace, role.trace):
        if actual.direction is not pattern.direction:
            return []
        subst = match(pattern.message, actual.message, subst[0])
        if not subst:
            return []
    return subst


def make_skeleton(protocol: Protocol, vars, strands, orderings=(), non=(), uniq=()) -> Skeleton:
    """Convenience constructor.

    ``strands`` is a sequence of ``(role_name, height, {role_var: term})``.
    """
    instances = tuple(
        Instance(protocol.role(r), h, dict(sub)) for r, h, sub in strands)
    return Skeleton(
        protocol=protocol,
        vars=tuple(vars),
        instances=instances,
        orderings=frozenset((Node(*a), Node(*b)) for a, b in orderings),
        non=tuple(dict.fromkeys(canonicalize(t) for t in non)),
        uniq=tuple(dict.fromkeys(canonicalize(t) for t in uniq)),
    )
