import random

import pytest

from colourproofs.encodings import (encode_colouring01, encode_colouring_roots,
                                    encode_fphp)
from colourproofs.errors import DegreeTooSmall
from colourproofs.fields import FieldSpec
from colourproofs.graphs import FphpInstance, Graph
from colourproofs.nullsatz import nss_min_degree
from colourproofs.oracle import (poly_system_satisfiable_01,
                                 poly_system_satisfiable_roots)
from colourproofs.pcsearch import (PcBuilder, PcProof, nss_to_pc, pc_check,
                                   pc_min_degree, pc_proof_from_jsonl,
                                   pc_proof_to_jsonl, pc_refutable_at_degree)
from colourproofs.polynomials import Polynomial
from conftest import tiny_system

# regression constants, pinned after first computation
K4_01_PC_DEGREE = 3
K43_FPHP_PC_DEGREE = 3


def two_line_refutation(gf2):
    sys_ = tiny_system(gf2, [Polynomial.variable(gf2, "boolean", 0),
                             Polynomial.variable(gf2, "boolean", 0) - Polynomial.one(gf2, "boolean")],
                       1)
    builder = PcBuilder(sys_)
    a = builder.initial(0)
    b = builder.initial(1)
    builder.lincomb(a, b, gf2.one, -gf2.one)
    return sys_, builder.proof()


def test_two_line_refutation(gf2):
    sys_, proof = two_line_refutation(gf2)
    valid, degree = pc_check(proof, sys_)
    assert valid and degree == 1 and proof.is_refutation()


def test_tampered_lincomb_rejected(gf2):
    sys_, proof = two_line_refutation(gf2)
    poly, (_, i, j, a, b) = proof.lines[2]
    bad = PcProof(proof.lines[:2] + [(poly, ("lincomb", i, j, a, gf2.zero))])
    valid, offending = pc_check(bad, sys_)
    assert not valid and offending == 2


def test_refutable_at_degree_one(gf2):
    sys_, _ = two_line_refutation(gf2)
    refutable, witness = pc_refutable_at_degree(sys_, 1)
    assert refutable
    valid, degree = pc_check(witness, sys_)
    assert valid and degree <= 1 and witness.is_refutation()


def test_satisfiable_never_refutable(gf2):
    sys_ = tiny_system(gf2, [Polynomial.variable(gf2, "boolean", 0)], 1)
    assert pc_min_degree(sys_, 4) is None
    sys2 = tiny_system(gf2, [], 1)  # boolean axiom alone
    assert pc_min_degree(sys2, 4) is None


def test_degree_too_small(gf2, k43):
    sys_ = encode_fphp(k43, gf2)
    with pytest.raises(DegreeTooSmall):
        pc_refutable_at_degree(sys_, 1)


def test_fphp_2_1_degree_and_witness(gf2):
    sys_ = encode_fphp(FphpInstance.build([[0], [0]], 1), gf2)
    got = pc_min_degree(sys_, 4, want_witness=True)
    assert got is not None and got[0] == 2
    valid, degree = pc_check(got[1], sys_)
    assert valid and degree <= 2 and got[1].is_refutation()


def test_k43_fphp_degree(gf2, k43):
    sys_ = encode_fphp(k43, gf2)
    got = pc_min_degree(sys_, 6, want_witness=True)
    assert got is not None and got[0] == K43_FPHP_PC_DEGREE
    assert pc_check(got[1], sys_)[0]


def test_k4_01_degree(gf2):
    sys_ = encode_colouring01(Graph.complete(4), 3, gf2)
    got = pc_min_degree(sys_, 6, want_witness=True)
    assert got is not None and got[0] == K4_01_PC_DEGREE
    valid, degree = pc_check(got[1], sys_)
    assert valid and degree <= K4_01_PC_DEGREE


def test_roots_backend_agrees(gf4):
    sys_ = encode_colouring_roots(Graph.complete(4), 3, gf4)
    got = pc_min_degree(sys_, 6, want_witness=True)
    assert got is not None and got[0] == 3
    assert pc_check(got[1], sys_)[0]


def test_saturation_soundness_small(gf2, gf4):
    cases = [
        (encode_colouring01(Graph.cycle(5), 3, gf2), poly_system_satisfiable_01),
        (encode_colouring01(Graph.cycle(4), 2, gf2), poly_system_satisfiable_01),
        (encode_colouring_roots(Graph.cycle(5), 3, gf4), poly_system_satisfiable_roots),
    ]
    for sys_, oracle_fn in cases:
        sat = oracle_fn(sys_).satisfiable
        got = pc_min_degree(sys_, 4)
        if got is not None:
            assert not sat


def test_saturation_completeness_full_degree(gf2):
    # with degree = variable count, refutable iff the oracle says unsat
    rng = random.Random(12)
    perms = [(0, 1), (1, 0)]
    for trial in range(12):
        g_edges = [(u, v) for u in range(4) for v in range(u + 1, 4) if rng.random() < 0.5]
        g = Graph.build(4, g_edges)
        k = rng.choice([2, 3])
        sys_ = encode_colouring01(g, k, gf2)
        n = len(sys_.variables())
        if n > 10:
            continue
        sat = poly_system_satisfiable_01(sys_).satisfiable
        got = pc_min_degree(sys_, max(n, sys_.search_floor_degree()))
        assert (got is None) == sat


def test_pc_never_exceeds_nss(gf2, gf4, k43):
    corpus = [
        encode_fphp(FphpInstance.build([[0], [0]], 1), gf2),
        encode_fphp(k43, gf2),
        encode_colouring01(Graph.complete(3), 2, gf2),
        encode_colouring01(Graph.complete(4), 3, gf2),
        encode_colouring_roots(Graph.complete(4), 3, gf4),
    ]
    for sys_ in corpus:
        nss = nss_min_degree(sys_, 5)
        pc = pc_min_degree(sys_, 5)
        assert nss is not None and pc is not None
        assert pc[0] <= nss[0]


def test_nss_to_pc(gf2, k43):
    for sys_ in (encode_fphp(FphpInstance.build([[0], [0]], 1), gf2),
                 encode_fphp(k43, gf2)):
        d, cert = nss_min_degree(sys_, 5)
        proof = nss_to_pc(sys_, cert)
        valid, degree = pc_check(proof, sys_)
        assert valid and proof.is_refutation() and degree <= d


def test_witness_line_mutations_rejected(gf2, k43):
    sys_ = encode_fphp(k43, gf2)
    _, witness = pc_min_degree(sys_, 4, want_witness=True)
    rng = random.Random(13)
    bump = Polynomial.one(gf2, "boolean")
    for _ in range(25):
        t = rng.randrange(len(witness.lines))
        poly, just = witness.lines[t]
        lines = list(witness.lines)
        lines[t] = (poly + bump, just)
        valid, offending = pc_check(PcProof(lines), sys_)
        assert not valid and offending == t


def test_proof_jsonl_round_trip(gf2, k43):
    sys_ = encode_fphp(k43, gf2)
    _, witness = pc_min_degree(sys_, 4, want_witness=True)
    text = pc_proof_to_jsonl(witness)
    back = pc_proof_from_jsonl(text, sys_)
    assert pc_check(back, sys_)[0]
    assert pc_proof_to_jsonl(back) == text


def test_boolean_axiom_line(gf2):
    sys_ = tiny_system(gf2, [Polynomial.variable(gf2, "boolean", 0)], 1)
    builder = PcBuilder(sys_)
    builder.boolean(0)
    valid, degree = pc_check(builder.proof(), sys_)
    assert valid and degree == 2  # nominal pre-reduction degree
