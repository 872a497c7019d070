"""Seeded random generators for protocols, skeletons and homomorphisms."""

from __future__ import annotations

import random

from shapesent.algebra import (
    KEY_SORTS, Enc, Nat, Pair, Sort, Var, apply, canonicalize, carried_by, invk,
    sort_leq, sort_of, variables,
)
from shapesent.homomorphism import Homomorphism, verify
from shapesent.skeleton import (
    Event, Direction, Instance, Node, Protocol, Role, Skeleton,
    check_wellformed, origination_nodes,
)

A, B = Var("a", Sort.AKEY), Var("b", Sort.AKEY)
S = Var("s", Sort.SKEY)
D, E = Var("d", Sort.DATA), Var("e", Sort.DATA)
POOL = (A, B, S, D, E)


def random_term(rng: random.Random, leaves, keys, depth: int):
    if depth == 0 or rng.random() < 0.35:
        return rng.choice(leaves)
    if rng.random() < 0.5:
        return Pair(random_term(rng, leaves, keys, depth - 1),
                    random_term(rng, leaves, keys, depth - 1))
    return Enc(random_term(rng, leaves, keys, depth - 1), rng.choice(keys))


def _leaves(vs):
    out = list(vs)
    out += [invk(v) for v in vs if v.sort is Sort.AKEY]
    return out


def _keys(vs):
    return [t for t in _leaves(vs) if sort_of(t) in KEY_SORTS]


def random_protocol(rng: random.Random, name: str = "gen") -> Protocol:
    roles = []
    for r in range(rng.randint(1, 2)):
        rv = [Var("x", Sort.AKEY), Var("y", Sort.SKEY), Var("n", Sort.DATA)]
        if rng.random() < 0.3:
            rv.append(Var("m", Sort.TOP))
        length = rng.randint(1, 3)
        events = []
        for _ in range(length):
            msg = canonicalize(random_term(rng, _leaves(rv), _keys(rv), 2))
            direction = rng.choice((Direction.SEND, Direction.RECV))
            events.append(Event(direction, msg))
        used = {v for ev in events for v in variables(ev.message)}
        roles.append(Role(f"r{r}", tuple(v for v in rv if v in used), tuple(events)))
    return Protocol(name, tuple(roles))


def fixed_protocol() -> Protocol:
    """A two-role protocol in the style of the Blanchet example."""
    x, y = Var("x", Sort.AKEY), Var("y", Sort.AKEY)
    k, n = Var("k", Sort.SKEY), Var("n", Sort.DATA)
    first = Enc(Enc(k, invk(x)), y)
    init = Role("init", (x, y, k, n), (Event(Direction.SEND, first), Event(Direction.RECV, Enc(n, k))))
    resp = Role("resp", (x, y, k, n), (Event(Direction.RECV, first), Event(Direction.SEND, Enc(n, k))))
    return Protocol("fixed", (init, resp))


def _value_for(rng, var: Var, pool):
    same = [v for v in pool if v.sort is var.sort]
    if var.sort is Sort.TOP:
        return canonicalize(random_term(rng, _leaves(pool), _keys(pool), 1))
    if var.sort is Sort.AKEY and rng.random() < 0.15:
        return invk(rng.choice(same))
    return rng.choice(same)


def _uniq_orderings(k: Skeleton, uniq) -> set:
    extra = set()
    for t in uniq:
        orig = origination_nodes(k, t)
        if len(orig) != 1:
            continue
        (n0,) = orig
        for n in k.nodes():
            if n.strand != n0.strand and carried_by(t, k.event(n).message):
                extra.add((n0, n))
    return extra


def _candidate_atoms(k: Skeleton):
    out = []
    for v in k.vars:
        if v.sort in (Sort.AKEY, Sort.SKEY, Sort.DATA):
            out.append(v)
            if v.sort is Sort.AKEY:
                out.append(invk(v))
    return out


def random_skeleton(rng: random.Random, protocol: Protocol, pool=POOL,
                    max_strands: int = 3, tries: int = 50) -> Skeleton:
    for _ in range(tries):
        instances = []
        for _ in range(rng.randint(1, max_strands)):
            role = rng.choice(protocol.roles)
            h = rng.randint(1, len(role.trace))
            subst = {x: _value_for(rng, x, pool) for x in role.prefix_vars(h)}
            instances.append(Instance(role, h, subst))
        used = {v for inst in instances for t in inst.subst.values() for v in variables(t)}
        kvars = tuple(v for v in pool if v in used)
        nodes = [Node(s, i) for s, inst in enumerate(instances) for i in range(inst.height)]
        orderings = set()
        for _ in range(rng.randint(0, 2)):
            a, b = rng.choice(nodes), rng.choice(nodes)
            if a.strand != b.strand:
                orderings.add((a, b))
        base = Skeleton(protocol, kvars, tuple(instances), frozenset(orderings))
        atoms = _candidate_atoms(base)
        non = [t for t in atoms if rng.random() < 0.25 and not origination_nodes(base, t)]
        uniq = [t for t in atoms if rng.random() < 0.25 and len(origination_nodes(base, t)) <= 1]
        orderings |= _uniq_orderings(base, uniq)
        k = Skeleton(protocol, kvars, tuple(instances), frozenset(orderings),
                     tuple(non), tuple(uniq))
        if not check_wellformed(k):
            return k
    raise RuntimeError("could not generate a well-formed skeleton")


def random_image(rng: random.Random, k0: Skeleton, pool=POOL, tries: int = 50):
    """A skeleton k and homomorphism k0 -> k built by instantiating,
    extending and permuting k0."""
    protocol = k0.protocol
    for _ in range(tries):
        tau = {v: (_value_for(rng, v, pool) if rng.random() < 0.4 else v) for v in k0.vars}
        instances = []
        for inst in k0.instances:
            subst = {x: apply(tau, t) for x, t in inst.subst.items()}
            h = inst.height
            if h < len(inst.role.trace) and rng.random() < 0.3:
                h = rng.randint(h, len(inst.role.trace))
                for x in inst.role.prefix_vars(h):
                    subst.setdefault(x, _value_for(rng, x, pool))
            instances.append(Instance(inst.role, h, subst))
        # strand map before permutation: collapse duplicate instances sometimes
        phi = list(range(len(instances)))
        merged = []
        for j, inst in enumerate(instances):
            twin = next((m for m, other in enumerate(merged) if other == inst), None)
            if twin is not None and rng.random() < 0.5:
                phi[j] = twin
            else:
                phi[j] = len(merged)
                merged.append(inst)
        for _ in range(rng.randint(0, 1)):
            role = rng.choice(protocol.roles)
            h = rng.randint(1, len(role.trace))
            merged.append(Instance(role, h, {x: _value_for(rng, x, pool) for x in role.prefix_vars(h)}))
        perm = list(range(len(merged)))
        rng.shuffle(perm)
        instances = [None] * len(merged)
        for old, new in enumerate(perm):
            instances[new] = merged[old]
        phi = [perm[p] for p in phi]

        used = {v for inst in instances for t in inst.subst.values() for v in variables(t)}
        orderings = set()
        for a, b in k0.orderings:
            na, nb = Node(phi[a[0]], a[1]), Node(phi[b[0]], b[1])
            if na.strand != nb.strand:
                orderings.add((na, nb))
        nodes = [Node(s, i) for s, inst in enumerate(instances) for i in range(inst.height)]
        if rng.random() < 0.3:
            a, b = rng.choice(nodes), rng.choice(nodes)
            if a.strand != b.strand:
                orderings.add((a, b))
        non = list(dict.fromkeys(apply(tau, t) for t in k0.non))
        uniq = list(dict.fromkeys(apply(tau, t) for t in k0.uniq))
        for t in non + uniq:
            used.update(variables(t))
        kvars = tuple(v for v in pool if v in used)
        base = Skeleton(protocol, kvars, tuple(instances), frozenset(orderings))
        for t in _candidate_atoms(base):
            if rng.random() < 0.15 and t not in non and not origination_nodes(base, t):
                non.append(t)
        orderings |= _uniq_orderings(base, uniq)
        k = Skeleton(protocol, kvars, tuple(instances), frozenset(orderings),
                     tuple(non), tuple(uniq))
        if check_wellformed(k):
            continue
        if verify(k0, k, phi, tau):
            continue
        return k, Homomorphism.create(k0, k, phi, tau)
    return None


# ---------------------------------------------------------------- formulas

Z = (Var("z0", Sort.NAT), Var("z1", Sort.NAT))
IDX = Var("i", Sort.NAT)
MSG_VARS = (Var("x", Sort.AKEY), Var("y", Sort.SKEY), Var("m", Sort.DATA), Var("w", Sort.TOP))


def _message_arg(rng, sort, k):
    """A term of sort at most ``sort``: a formula variable, a skeleton
    constant, or a small pattern for TOP."""
    choices = [v for v in MSG_VARS if sort_leq(v.sort, sort)]
    consts = [t for t in _leaves(k.vars) if sort_leq(sort_of(t), sort)]
    r = rng.random()
    if sort is Sort.AKEY and r < 0.15:
        return invk(MSG_VARS[0])
    if sort is Sort.TOP and r < 0.3:
        return Enc(MSG_VARS[2], rng.choice((MSG_VARS[0], MSG_VARS[1])))
    if consts and r < 0.3:
        return rng.choice(consts)
    return rng.choice(choices)


def _nat_arg(rng, k, bound: int):
    r = rng.random()
    if r < 0.5:
        return Nat(rng.randrange(bound))
    if r < 0.8:
        return rng.choice(Z)
    return IDX


def random_conjunction(rng: random.Random, k: Skeleton, max_atoms: int = 4):
    """A random well-moded conjunction over the protocol of ``k``."""
    from shapesent.logic import (
        Equals, ModeError, Non, Orig, Prec, Progress, Uniq, check_moded,
    )
    height = max(inst.height for inst in k.instances)
    for _ in range(100):
        atoms = []
        for _ in range(rng.randint(1, max_atoms)):
            kind = rng.choices(("p", "prec", "non", "uniq", "orig", "eq"),
                               weights=(5, 2, 1, 1, 1, 1))[0]
            if kind == "p":
                if rng.random() < 0.8:
                    inst = rng.choice(k.instances)
                    role, h = inst.role, rng.randint(1, inst.height)
                else:
                    role = rng.choice(k.protocol.roles)
                    h = rng.randint(1, len(role.trace))
                x = rng.choice(role.prefix_vars(h))
                z = rng.choice(Z) if rng.random() < 0.85 else Nat(rng.randrange(len(k.instances)))
                atoms.append(Progress(role, h, x, z, _message_arg(rng, x.sort, k)))
            elif kind == "prec" and k.effective_order and rng.random() < 0.6:
                n0, n1 = rng.choice(sorted(k.effective_order))
                z0 = rng.choice(Z)
                z1 = z0 if n0.strand == n1.strand else next(z for z in Z if z != z0)
                atoms.append(Prec(z0, Nat(n0.index), z1, Nat(n1.index)))
            elif kind == "prec":
                atoms.append(Prec(rng.choice(Z), _nat_arg(rng, k, height),
                                  rng.choice(Z), _nat_arg(rng, k, height)))
            elif kind in ("non", "uniq", "orig"):
                sort = rng.choice((Sort.AKEY, Sort.SKEY, Sort.DATA))
                t = _message_arg(rng, sort, k)
                if kind == "non":
                    atoms.append(Non(t))
                elif kind == "uniq":
                    atoms.append(Uniq(t))
                else:
                    atoms.append(Orig(t, rng.choice(Z), _nat_arg(rng, k, height)))
            else:
                v = rng.choice(MSG_VARS)
                atoms.append(Equals(v, _message_arg(rng, v.sort, k)))
        try:
            check_moded(atoms)
        except ModeError:
            continue
        return tuple(atoms)
    raise RuntimeError("could not generate a well-moded conjunction")


def random_analysis(rng: random.Random, protocol: Protocol, images: int = 2):
    """A point of view with its identity and a few random images as shapes."""
    from shapesent.logic import ShapeAnalysis
    k0 = random_skeleton(rng, protocol)
    homs = [Homomorphism.identity(k0)]
    for _ in range(images):
        got = random_image(rng, k0)
        if got is not None:
            homs.append(got[1])
    return ShapeAnalysis(k0, tuple(homs))
