import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from shapesent.homomorphism import (
    Homomorphism, HomomorphismError, apply_hom, compose_hom, verify,
)
from shapesent.algebra import Sort, Var
from shapesent.skeleton import (
    Node, Protocol, Role, Skeleton, check_wellformed, make_skeleton, recv, send,
)
from conftest import a, b, b_, blanchet_k1, d, s
from generators import fixed_protocol, random_image, random_skeleton
from oracles import brute_homomorphisms


def conditions(failures):
    return sorted({f.condition for f in failures})


def test_delta1_verifies(k0, k1):
    assert verify(k0, k1, [0], {a: a, b: b, s: s, d: d}) == []
    assert verify(k0, k1, [0], {}) == []


def test_delta1_maps_nodes(delta1):
    assert delta1(Node(0, 1)) == Node(0, 1)
    assert apply_hom(delta1, (0, 0)) == Node(0, 0)
    with pytest.raises(ValueError):
        delta1(Node(1, 0))


def test_strand_map_flip_is_condition_3(k0, k1):
    assert conditions(verify(k0, k1, [1], {})) == [3]


def test_key_substitution_is_condition_3(k0, k1):
    assert conditions(verify(k0, k1, [0], {b: b_})) == [3]


def test_out_of_range_strand_map_is_condition_1(k0, k1):
    assert conditions(verify(k0, k1, [2], {})) == [1]
    assert conditions(verify(k0, k1, [0, 0], {})) == [1]


def test_ill_sorted_substitution_is_condition_2(k0, k1):
    assert 2 in conditions(verify(k0, k1, [0], {s: a}))


def test_dropped_edge_on_identity_is_condition_4(protocol, k1):
    # without uniq s the edge is not forced, so dropping it keeps k1 well formed
    plain = Skeleton(k1.protocol, k1.vars, k1.instances, k1.orderings, k1.non, ())
    dropped = Skeleton(k1.protocol, k1.vars, k1.instances, frozenset(), k1.non, ())
    assert conditions(verify(plain, dropped, [0, 1], {})) == [4]


def test_dropped_edge_makes_target_ill_formed(k0, protocol):
    assert conditions(verify(k0, blanchet_k1(protocol, orderings=()), [0], {})) == [0]


def test_missing_non_is_condition_5(k0, k1):
    target = Skeleton(k1.protocol, k1.vars, k1.instances, k1.orderings, k1.non[:1], k1.uniq)
    assert conditions(verify(k0, target, [0], {})) == [5]


def test_missing_uniq_is_condition_6(k0, k1):
    target = Skeleton(k1.protocol, k1.vars, k1.instances, k1.orderings, k1.non, ())
    assert conditions(verify(k0, target, [0], {})) == [6]


def test_lost_origination_is_condition_7():
    m, n = Var("m", Sort.TOP), Var("n", Sort.DATA)
    e = Var("e", Sort.DATA)
    p = Protocol("echo", (Role("r", (m, n), (recv(m), send(n))),))
    src = make_skeleton(p, (e, n), [("r", 2, {m: e, n: n})], uniq=(n,))
    tgt = make_skeleton(p, (n,), [("r", 2, {m: n, n: n})], uniq=(n,))
    assert check_wellformed(tgt) == []
    assert conditions(verify(src, tgt, [0], {e: n})) == [7]


def test_protocol_mismatch_is_condition_0(k0):
    other = random_skeleton(random.Random(1), fixed_protocol())
    assert 0 in conditions(verify(k0, other, [0], {}))


def test_create_raises(k0, k1):
    with pytest.raises(HomomorphismError) as e:
        Homomorphism.create(k0, k1, [1], {})
    assert e.value.failures[0].condition == 3


def test_identity_and_composition(k0, k1, delta1):
    ident = Homomorphism.identity(k1)
    both = compose_hom(ident, delta1)
    assert both.phi == delta1.phi
    assert dict(both.sigma) == dict(delta1.sigma)
    assert compose_hom(delta1, Homomorphism.identity(k0)).phi == (0,)


def test_brute_force_finds_exactly_delta1(k0, k1):
    found = brute_homomorphisms(k0, k1)
    assert found == [((0,), {a: a, b: b, s: s, d: d})]
    assert brute_homomorphisms(k1, k0) == []


# ---------------------------------------------------------------- properties

@given(st.integers(0, 100_000))
@settings(max_examples=60, deadline=None)
def test_generated_images_verify_and_compose(seed):
    rng = random.Random(seed)
    p = fixed_protocol()
    k0 = random_skeleton(rng, p)
    first = random_image(rng, k0)
    if first is None:
        return
    k, delta = first
    assert verify(k0, k, delta.phi, delta.sigma) == []
    second = random_image(rng, k)
    if second is None:
        return
    k2, gamma = second
    both = compose_hom(gamma, delta)
    assert verify(k0, k2, both.phi, both.sigma) == []
    for n in k0.nodes():
        assert both(n) == gamma(delta(n))


@given(st.integers(0, 100_000))
@settings(max_examples=40, deadline=None)
def test_verify_agrees_with_brute_force_search(seed):
    rng = random.Random(seed)
    p = fixed_protocol()
    k0 = random_skeleton(rng, p, max_strands=2)
    k = random_skeleton(rng, p, max_strands=2)
    for phi, sigma in brute_homomorphisms(k0, k):
        assert verify(k0, k, phi, sigma) == []
    # any candidate strand map rejected by the brute force is rejected by verify
    found = {phi for phi, _ in brute_homomorphisms(k0, k)}
    for phi in itertools.product(range(len(k.instances)), repeat=len(k0.instances)):
        if phi in found:
            continue
        assert verify(k0, k, phi, {}) != []
