"""Brute-force reference implementations used to cross-check the library.

Each oracle takes a different route from the code it checks: closure
computation instead of recursion, exhaustive enumeration instead of
matching or backtracking search.
"""

from __future__ import annotations

import itertools

from shapesent.algebra import (
    Enc, Invk, Pair, Sort, apply, invk, sort_leq, sort_of, subterms,
    variables,
)
from shapesent.logic import atom_vars, eval_atom
from shapesent.skeleton import Direction, Node


def carried_closure(t):
    """Every term carried by ``t``, by saturating the closure rules."""
    seen = {t}
    frontier = [t]
    while frontier:
        new = []
        for u in frontier:
            if isinstance(u, Pair):
                parts = (u.left, u.right)
            elif isinstance(u, Enc):
                parts = (u.body,)
            else:
                parts = ()
            for p in parts:
                if p not in seen:
                    seen.add(p)
                    new.append(p)
        frontier = new
    return seen


def candidates(t):
    """Subterms of t closed under key inverse."""
    out = set(subterms(t))
    for u in list(out):
        if sort_of(u) is Sort.AKEY:
            out.add(invk(u))
    return out


def brute_match(pattern, target):
    """All substitutions for the pattern's variables drawn from the
    subterm closure of the target that make the instance equal the target."""
    pvars = list(dict.fromkeys(variables(pattern)))
    pool = candidates(target)
    domains = [[c for c in pool if sort_leq(sort_of(c), v.sort)] for v in pvars]
    found = []
    for values in itertools.product(*domains):
        sigma = dict(zip(pvars, values))
        if apply(sigma, pattern) == target:
            found.append(sigma)
    return found


def universe(k):
    """Candidate values for message variables in skeleton k."""
    out = set()
    for tr in k.traces:
        for ev in tr:
            out |= candidates(ev.message)
    for t in (*k.non, *k.uniq):
        out |= candidates(t)
    return out


def brute_assignments(k, atoms, seed=None):
    seed = dict(seed or {})
    free = []
    for a in atoms:
        for v in atom_vars(a):
            if v not in seed and v not in free:
                free.append(v)
    msgs = universe(k)
    nat_range = range(max(len(k.instances), max(i.height for i in k.instances)))
    domains = []
    for v in free:
        if v.sort is Sort.NAT:
            domains.append(list(nat_range))
        else:
            domains.append([m for m in msgs if sort_leq(sort_of(m), v.sort)])
    found = []
    for values in itertools.product(*domains):
        alpha = dict(seed)
        alpha.update(zip(free, values))
        if all(eval_atom(k, alpha, a) for a in atoms):
            found.append(alpha)
    return found


def brute_homomorphisms(source, target):
    """All (phi, sigma) pairs passing verify, by trying every strand map and
    reading sigma off event by event."""
    from shapesent.homomorphism import verify

    found = []
    for phi in itertools.product(range(len(target.instances)), repeat=len(source.instances)):
        sigma = {}
        ok = True
        for n in source.nodes():
            m = Node(phi[n.strand], n.index)
            if not target.has_node(m):
                ok = False
                break
            ev, img = source.event(n), target.event(m)
            if ev.direction is not img.direction:
                ok = False
                break
            got = brute_match(ev.message, img.message)
            got = [g for g in got if all(sigma.get(x, y) == y for x, y in g.items())]
            if not got:
                ok = False
                break
            sigma.update(got[0])
        if ok and not verify(source, target, phi, sigma):
            found.append((phi, sigma))
    return found


def scan_origination(t, trace):
    """Index of origination, scanning carried sets event by event."""
    for i, ev in enumerate(trace):
        if t in carried_closure(ev.message):
            return i if ev.direction is Direction.SEND else None
    return None
