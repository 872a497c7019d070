"""Skeleton homomorphisms: a strand map paired with a message substitution."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .algebra import (
    Substitution, Term, Var, apply, compose, format_term, sort_leq, sort_of,
    variables,
)
from .skeleton import Node, Skeleton, check_wellformed


@dataclass(frozen=True)
class Failure:
    """A violated homomorphism condition.

    Condition 0 is reserved for ill-formed source or target skeletons.
    """
    condition: int
    message: str

    def __str__(self) -> str:
        return f"condition {self.condition}: {self.message}"


class HomomorphismError(ValueError):
    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join(str(f) for f in self.failures))


def _total_subst(source: Skeleton, sigma: Substitution) -> dict[Var, Term]:
    return {x: sigma.get(x, x) for x in source.vars}


def verify(source: Skeleton, target: Skeleton, phi: Sequence[int],
           sigma: Substitution) -> list[Failure]:
    """Check the seven homomorphism conditions, returning every failure.

    Variables of the source missing from ``sigma`` are mapped to themselves.
    """
    failures: list[Failure] = []
    for which, k in (("source", source), ("target", target)):
        for problem in check_wellformed(k):
            failures.append(Failure(0, f"{which} skeleton: {problem}"))
    if source.protocol != target.protocol:
        failures.append(Failure(0, "skeletons use different protocols"))
    if failures:
        return failures

    phi = list(phi)
    if len(phi) != len(source.instances):
        failures.append(Failure(1, f"strand map has {len(phi)} entries, "
                                   f"source has {len(source.instances)} strands"))
    for s, image in enumerate(phi):
        if not isinstance(image, int) or not 0 <= image < len(target.instances):
            failures.append(Failure(1, f"strand {s} maps to nonexistent strand {image}"))
    if failures:
        return failures

    target_vars = set(target.vars)
    sigma_total = _total_subst(source, sigma)
    for x, t in sigma.items():
        if x not in source.vars:
            failures.append(Failure(2, f"{x.name} is not a source variable"))
    for x, t in sigma_total.items():
        if not sort_leq(sort_of(t), x.sort):
            failures.append(Failure(2, f"{x.name}:{x.sort} maps to {format_term(t)} of sort {sort_of(t)}"))
        for v in variables(t):
            if v not in target_vars:
                failures.append(Failure(2, f"{x.name} maps to {format_term(t)}, "
                                           f"but {v.name} is not a target variable"))

    for n in source.nodes():
        image = Node(phi[n.strand], n.index)
        expected = source.event(n)
        expected_msg = apply(sigma_total, expected.message)
        if not target.has_node(image):
            failures.append(Failure(3, f"node {tuple(n)} maps to nonexistent node {tuple(image)}"))
            continue
        actual = target.event(image)
        if actual.direction is not expected.direction or actual.message != expected_msg:
            failures.append(Failure(
                3, f"node {tuple(n)}: {expected.sign}{format_term(expected_msg)} "
                   f"differs from {actual.sign}{format_term(actual.message)} at {tuple(image)}"))
    if any(f.condition == 3 for f in failures):
        # node images are unreliable; skip order and origination checks
        return failures

    for n0, n1 in sorted(source.effective_order):
        m0, m1 = Node(phi[n0.strand], n0.index), Node(phi[n1.strand], n1.index)
        if not target.precedes(m0, m1):
            failures.append(Failure(4, f"{tuple(n0)} < {tuple(n1)} but {tuple(m0)} is not before {tuple(m1)}"))

    target_non, target_uniq = set(target.non), set(target.uniq)
    for t in source.non:
        image = apply(sigma_total, t)
        if image not in target_non:
            failures.append(Failure(5, f"non-originating {format_term(t)} maps to {format_term(image)}, not in target"))
    for t in source.uniq:
        image = apply(sigma_total, t)
        if image not in target_uniq:
            failures.append(Failure(6, f"uniquely originating {format_term(t)} maps to {format_term(image)}, not in target"))
    for t in source.uniq:
        image = apply(sigma_total, t)
        target_orig = target.origination_nodes(image)
        for n in sorted(source.origination_nodes(t)):
            m = Node(phi[n.strand], n.index)
            if m not in target_orig:
                failures.append(Failure(7, f"{format_term(t)} originates at {tuple(n)} "
                                           f"but {format_term(image)} does not originate at {tuple(m)}"))
    return failures


@dataclass(frozen=True, eq=False)
class Homomorphism:
    source: Skeleton
    target: Skeleton
    phi: tuple[int, ...]
    sigma: Mapping[Var, Term]

    @classmethod
    def create(cls, source: Skeleton, target: Skeleton, phi: Sequence[int],
               sigma: Substitution) -> "Homomorphism":
        failures = verify(source, target, phi, sigma)
        if failures:
            raise HomomorphismError(failures)
        return cls(source, target, tuple(phi), _total_subst(source, sigma))

    @classmethod
    def identity(cls, k: Skeleton) -> "Homomorphism":
        return cls.create(k, k, range(len(k.instances)), {v: v for v in k.vars})

    def __call__(self, n) -> Node:
        return apply_hom(self, n)


def apply_hom(delta: Homomorphism, n) -> Node:
    if not delta.source.has_node(n):
        raise ValueError(f"{tuple(n)} is not a node of the source skeleton")
    return Node(delta.phi[n[0]], n[1])


def compose_hom(second: Homomorphism, first: Homomorphism) -> Homomorphism:
    if first.target is not second.source and not first.target.same_as(second.source):
        raise ValueError("homomorphisms do not compose: skeleton mismatch")
    phi = [second.phi[j] for j in first.phi]
    sigma = compose(second.sigma, first.sigma)
    sigma = {x: sigma[x] for x in first.source.vars}
    return Homomorphism.create(first.source, second.target, phi, sigma)

