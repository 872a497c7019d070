"""Order-sorted message algebra.

Messages are built from atoms (asymmetric keys, symmetric keys, data) by
pairing and encryption.  Key inverse is an involution on asymmetric keys and
the identity on symmetric keys, so every term has a canonical representative
with the fewest inverse operations.  All terms handed out by this module are
canonical, which makes equality syntactic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union


class SortError(ValueError):
    pass


class Sort(enum.Enum):
    TOP = "mesg"
    AKEY = "akey"
    SKEY = "skey"
    DATA = "data"
    NAT = "strd"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name: str) -> "Sort":
        try:
            return cls(name)
        except ValueError:
            raise SortError(f"unknown sort {name!r}") from None


ATOMIC_SORTS = frozenset({Sort.AKEY, Sort.SKEY, Sort.DATA})
KEY_SORTS = frozenset({Sort.AKEY, Sort.SKEY})
MESSAGE_SORTS = ATOMIC_SORTS | {Sort.TOP}


def sort_leq(lower: Sort, upper: Sort) -> bool:
    """The subsort order: each atomic sort lies below TOP, NAT stands alone."""
    return lower == upper or (upper is Sort.TOP and lower in ATOMIC_SORTS)


@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True)
class Enc:
    body: "Term"
    key: "Term"

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True)
class Invk:
    key: "Term"

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True)
class Nat:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise SortError("natural number literal must be nonnegative")

    def __str__(self) -> str:
        return str(self.value)


Term = Union[Var, Pair, Enc, Invk, Nat]
Substitution = Mapping[Var, Term]


def sort_of(t: Term) -> Sort:
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, Nat):
        return Sort.NAT
    if isinstance(t, (Pair, Enc)):
        return Sort.TOP
    if isinstance(t, Invk):
        return sort_of(t.key)
    raise TypeError(f"not a term: {t!r}")


def is_message(t: Term) -> bool:
    return sort_of(t) in MESSAGE_SORTS


def is_atom(t: Term) -> bool:
    return sort_of(t) in ATOMIC_SORTS


def invk(k: Term) -> Term:
    """Inverse of a canonical key, itself canonical."""
    s = sort_of(k)
    if s is Sort.SKEY:
        return k
    if s is not Sort.AKEY:
        raise SortError(f"inverse of non-key {format_term(k)} (sort {s})")
    if isinstance(k, Invk):
        return k.key
    return Invk(k)


def pair(*parts: Term) -> Term:
    """Right-associated tuple: pair(a, b, c) is (a, (b, c))."""
    if not parts:
        raise ValueError("pair needs at least one component")
    result = parts[-1]
    for p in reversed(parts[:-1]):
        result = Pair(p, result)
    return result


def canonicalize(t: Term) -> Term:
    if isinstance(t, (Var, Nat)):
        return t
    if isinstance(t, Pair):
        left, right = canonicalize(t.left), canonicalize(t.right)
        for part in (left, right):
            if not is_message(part):
                raise SortError(f"pair component {format_term(part)} is not a message")
        return Pair(left, right)
    if isinstance(t, Enc):
        body, key = canonicalize(t.body), canonicalize(t.key)
        if not is_message(body):
            raise SortError(f"encrypted body {format_term(body)} is not a message")
        if sort_of(key) not in KEY_SORTS:
            raise SortError(f"encryption key {format_term(key)} has sort {sort_of(key)}")
        return Enc(body, key)
    if isinstance(t, Invk):
        return invk(canonicalize(t.key))
    raise TypeError(f"not a term: {t!r}")


def is_canonical(t: Term) -> bool:
    if isinstance(t, (Var, Nat)):
        return True
    if isinstance(t, Pair):
        return is_canonical(t.left) and is_canonical(t.right)
    if isinstance(t, Enc):
        return is_canonical(t.body) and is_canonical(t.key)
    if isinstance(t, Invk):
        return isinstance(t.key, Var) and t.key.sort is Sort.AKEY
    return False


def variables(t: Term) -> Iterator[Var]:
    """Variables of t, left to right, with repeats."""
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Pair):
        yield from variables(t.left)
        yield from variables(t.right)
    elif isinstance(t, Enc):
        yield from variables(t.body)
        yield from variables(t.key)
    elif isinstance(t, Invk):
        yield from variables(t.key)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Pair):
        yield from subterms(t.left)
        yield from subterms(t.right)
    elif isinstance(t, Enc):
        yield from subterms(t.body)
        yield from subterms(t.key)
    elif isinstance(t, Invk):
        yield from subterms(t.key)


def depth(t: Term) -> int:
    if isinstance(t, (Pair, Enc)):
        a, b = (t.left, t.right) if isinstance(t, Pair) else (t.body, t.key)
        return 1 + max(depth(a), depth(b))
    if isinstance(t, Invk):
        return 1 + depth(t.key)
    return 0


def apply(subst: Substitution, t: Term) -> Term:
    if isinstance(t, Var):
        return subst.get(t, t)
    if isinstance(t, Nat):
        return t
    if isinstance(t, Pair):
        return Pair(apply(subst, t.left), apply(subst, t.right))
    if isinstance(t, Enc):
        return Enc(apply(subst, t.body), apply(subst, t.key))
    if isinstance(t, Invk):
        return invk(apply(subst, t.key))
    raise TypeError(f"not a term: {t!r}")


def check_substitution(subst: Substitution) -> None:
    for x, t in subst.items():
        if not sort_leq(sort_of(t), x.sort):
            raise SortError(
                f"{x.name}:{x.sort} cannot be bound to {format_term(t)} of sort {sort_of(t)}")


def compose(second: Substitution, first: Substitution) -> dict[Var, Term]:
    """Substitution equivalent to applying ``first`` and then ``second``."""
    result = {x: apply(second, t) for x, t in first.items()}
    for x, t in second.items():
        result.setdefault(x, t)
    return result


def match(pattern: Term, target: Term,
          partial: Optional[Substitution] = None) -> list[dict[Var, Term]]:
    """All extensions of ``partial`` mapping ``pattern`` onto ``target``.

    Only variables of the pattern are bound; variables of the target are
    treated as constants.  Both terms must be canonical.  Matching modulo the
    inverse equations is unitary for this algebra, so the list holds at most
    one substitution.
    """
    subst = dict(partial) if partial else {}
    if _match(pattern, target, subst):
        return [subst]
    return []


def _match(p: Term, t: Term, subst: dict) -> bool:
    if isinstance(p, Var):
        bound = subst.get(p)
        if bound is not None:
            return bound == t
        if not sort_leq(sort_of(t), p.sort):
            return False
        subst[p] = t
        return True
    if isinstance(p, Nat):
        return p == t
    if isinstance(p, Pair):
        return (isinstance(t, Pair) and _match(p.left, t.left, subst)
                and _match(p.right, t.right, subst))
    if isinstance(p, Enc):
        return (isinstance(t, Enc) and _match(p.body, t.body, subst)
                and _match(p.key, t.key, subst))
    if isinstance(p, Invk):
        # inverse is a bijection on asymmetric keys: move it to the target side
        if sort_of(t) is not Sort.AKEY:
            return False
        return _match(p.key, invk(t), subst)
    raise TypeError(f"not a term: {p!r}")


def carried_by(small: Term, big: Term) -> bool:
    """True when ``small`` can be extracted from ``big`` given the right keys."""
    if small == big:
        return True
    if isinstance(big, Pair):
        return carried_by(small, big.left) or carried_by(small, big.right)
    if isinstance(big, Enc):
        return carried_by(small, big.body)
    return False


def atoms_of(t: Term) -> set[Term]:
    if sort_of(t) in ATOMIC_SORTS:
        return {t}
    if isinstance(t, Pair):
        return atoms_of(t.left) | atoms_of(t.right)
    if isinstance(t, Enc):
        return atoms_of(t.body) | atoms_of(t.key)
    return set()


def format_term(t: Term) -> str:
    """S-expression form; n-ary ``cat`` for right-nested pairs."""
    if isinstance(t, (Var, Nat)):
        return str(t)
    if isinstance(t, Pair):
        parts = [t.left]
        rest = t.right
        while isinstance(rest, Pair):
            parts.append(rest.left)
            rest = rest.right
        parts.append(rest)
        return "(cat " + " ".join(format_term(p) for p in parts) + ")"
    if isinstance(t, Enc):
        return f"(enc {format_term(t.body)} {format_term(t.key)})"
    if isinstance(t, Invk):
        return f"(invk {format_term(t.key)})"
    raise TypeError(f"not a term: {t!r}")


def term_key(t: Term) -> tuple:
    """Total order on terms used for deterministic output."""
    if isinstance(t, Nat):
        return (0, t.value)
    if isinstance(t, Var):
        return (1, t.name, t.sort.value)
    if isinstance(t, Invk):
        return (2, term_key(t.key))
    if isinstance(t, Pair):
        return (3, term_key(t.left), term_key(t.right))
    return (4, term_key(t.body), term_key(t.key))


def make_varset(vs) -> tuple[Var, ...]:
    """Validate a sequence of variables as a variable set (unique names)."""
    seen: dict[str, Var] = {}
    for v in vs:
        prior = seen.get(v.name)
        if prior is not None and prior != v:
            raise SortError(f"variable {v.name} declared with sorts {prior.sort} and {v.sort}")
        seen[v.name] = v
    return tuple(seen.values())
