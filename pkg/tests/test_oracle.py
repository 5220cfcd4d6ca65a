import itertools
import random

import pytest

from colourproofs.encodings import encode_colouring01
from colourproofs.errors import BudgetExceeded
from colourproofs.graphs import FphpInstance, Graph
from colourproofs.oracle import (brute_colour, brute_fphp, check_claim_gadget,
                                 complete_left_matching, hall_violator,
                                 poly_system_satisfiable_01)
from colourproofs.reduction import build_gadget


def test_k4_not_three_colourable():
    assert not brute_colour(Graph.complete(4), 3).satisfiable


def test_c5_three_colourable():
    v = brute_colour(Graph.cycle(5), 3)
    assert v.satisfiable
    g = Graph.cycle(5)
    for u, w in g.edges:
        assert v.witness[u] != v.witness[w]


def test_precolouring_respected():
    g = Graph.build(2, [(0, 1)])
    v = brute_colour(g, 2, precolouring={0: 1})
    assert v.satisfiable and v.witness[0] == 1 and v.witness[1] == 0
    assert not brute_colour(g, 1, precolouring={0: 0}).satisfiable


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        brute_colour(Graph.build(12, []), 3, budget=5)


def test_fphp_shared_hole():
    assert not brute_fphp(FphpInstance.build([[0], [0]], 1)).satisfiable


def test_fphp_matching_witness():
    b = FphpInstance.build([[0, 1], [0, 1]], 2)
    v = brute_fphp(b)
    assert v.satisfiable and len(set(v.witness)) == 2


def test_counting_unsat_complete(k43):
    assert not brute_fphp(k43).satisfiable
    assert complete_left_matching(k43) is None
    assert hall_violator(k43) == [0, 1, 2, 3]


def test_matching_agrees_with_brute():
    rng = random.Random(2)
    for _ in range(60):
        n = rng.randint(1, 5)
        h = rng.randint(2, 5)
        k = rng.randint(1, min(3, h))
        rows = [sorted(rng.sample(range(h), k)) for _ in range(n)]
        b = FphpInstance.build(rows, h)
        assert (complete_left_matching(b) is not None) == brute_fphp(b).satisfiable


def test_empty_system_satisfiable(gf2):
    from colourproofs.encodings import PolySystem

    sys_ = PolySystem(gf2, "boolean", [], 0, {})
    v = poly_system_satisfiable_01(sys_)
    assert v.satisfiable and v.witness == {}


def test_colouring_encoding_agreement_c5(gf2):
    sys_ = encode_colouring01(Graph.cycle(5), 3, gf2)
    v = poly_system_satisfiable_01(sys_)
    assert v.satisfiable
    # the witness decodes to a legal colouring
    colouring = {}
    for var, val in v.witness.items():
        if val.is_one():
            colouring[var // 3] = var % 3
    for u, w in Graph.cycle(5).edges:
        assert colouring[u] != colouring[w]


def test_claim_gadget_all_pairs_k3():
    for c in range(3):
        for cp in range(3):
            g = build_gadget(0, 1, c, cp, 3, itertools.count(2))
            assert check_claim_gadget(g)


def test_claim_gadget_detects_mutation():
    import dataclasses

    g = build_gadget(0, 1, 1, 1, 3, itertools.count(2))
    # claim a different excluded pair than the one the structure enforces
    broken = dataclasses.replace(g, colours=(2, 2))
    assert not check_claim_gadget(broken)
    # break the forcing by re-pinning a contact vertex off its colour
    w, wp = g.precoloured[0][0], g.precoloured[1][0]
    broken2 = dataclasses.replace(g, precoloured=((w, 2), (wp, 1)))
    assert not check_claim_gadget(broken2)


def test_claim_gadget_k4_edge_variant():
    g = build_gadget(0, 1, 2, 2, 4, itertools.count(2))
    assert check_claim_gadget(g)
