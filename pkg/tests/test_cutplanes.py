import itertools
import random

import pytest

from colourproofs.cutplanes import (CpBuilder, CpProof, WEAKEN_LENGTH_FACTOR,
                                    cp_branch_compose, cp_check,
                                    cp_proof_from_jsonl, cp_proof_to_jsonl,
                                    cp_refute_gadget, cp_refute_php,
                                    cp_refute_reduction, cp_restrict, cp_weaken,
                                    extend_with_assignments, line_div,
                                    reduction_length_bound, restrict_cp_system)
from colourproofs.encodings import CpLine, CpSystem, encode_colouring_cp
from colourproofs.errors import InputNotRefutation, MatchingExists, MissingBranch
from colourproofs.graphs import FphpInstance, Graph
from colourproofs.oracle import cp_system_satisfiable_01
from colourproofs.reduction import build_gadget, build_reduction


def test_div_rounds_bound_up():
    b = CpBuilder(CpSystem([("a", CpLine({0: 2, 1: 2}, 1))], 2, {}))
    b.div(b.initial(0), 2)
    assert b.line(1) == CpLine({0: 1, 1: 1}, 1)


def test_div_rounding_matches_rational_ceiling():
    rng = random.Random(21)
    from fractions import Fraction

    for _ in range(300):
        c = rng.randint(1, 9)
        bound = rng.randint(-30, 30)
        line = CpLine({0: c * rng.randint(-5, 5)}, bound)
        out = line_div(line, c)
        assert out.bound == -(-Fraction(bound, c)).__floor__()


def test_illegal_division_rejected():
    sys_ = CpSystem([("a", CpLine({0: 2, 1: 3}, 1))], 2, {})
    proof = CpProof([(CpLine({0: 2, 1: 3}, 1), ("initial", 0)),
                     (CpLine({0: 1, 1: 1}, 1), ("div", 0, 2))])
    res = cp_check(proof, sys_)
    assert not res.valid and res.offending_line == 1 and res.reason == "illegal division"


def test_sum_refutation():
    sys_ = CpSystem([("a", CpLine({0: 1}, 1)), ("a", CpLine({0: -1}, 0))], 1, {})
    b = CpBuilder(sys_)
    b.sum(b.initial(0), b.initial(1))
    proof = b.proof()
    assert cp_check(proof, sys_).valid and proof.is_refutation()


def test_checker_rejects_single_line_mutations():
    sys_, proof = cp_refute_php(FphpInstance.build([[0, 1], [0, 1], [1, 0]], 2))
    rng = random.Random(22)
    for _ in range(40):
        t = rng.randrange(len(proof.lines))
        line, just = proof.lines[t]
        mutated = CpLine(dict(line.coeffs), line.bound + 1)
        lines = list(proof.lines)
        lines[t] = (mutated, just)
        res = cp_check(CpProof(lines), sys_)
        assert not res.valid
        assert res.offending_line is not None


# -- restriction -------------------------------------------------------------


def _random_refutation(rng, n_vars=5, n_extra=4):
    """A random valid refutation built by planting a closing inequality:
    random nonnegative combination with a pin, then one summand that forces
    0 >= 1.  Exercises sum, scalar, and division steps."""
    lines = [CpLine({v: rng.randint(-3, 3) for v in rng.sample(range(n_vars), 3)},
                    rng.randint(-2, 2)) for _ in range(n_extra)]
    builder_lines = []
    acc = None
    sys_lines = [("a", ln) for ln in lines]
    sys_ = CpSystem(sys_lines, n_vars, {})
    b = CpBuilder(sys_)
    refs = [b.initial(i) for i in range(n_extra)]
    acc = refs[0]
    for i in refs[1:]:
        if rng.random() < 0.5:
            acc = b.sum(acc, i)
        else:
            acc = b.sum(b.scalar(acc, rng.randint(1, 3)), i)
    if rng.random() < 0.6:
        c = rng.randint(2, 4)
        acc = b.div(b.scalar(acc, c), c)
    closer = CpLine({v: -c for v, c in b.line(acc).coeffs.items()},
                    1 - b.line(acc).bound)
    sys2 = CpSystem(sys_lines + [("a", closer)], n_vars, {})
    b2 = CpBuilder(sys2)
    remap = {}
    for t, (ln, just) in enumerate(b.lines):
        if just[0] == "initial":
            remap[t] = b2.initial(just[1])
        elif just[0] == "sum":
            remap[t] = b2.sum(remap[just[1]], remap[just[2]])
        elif just[0] == "scalar":
            remap[t] = b2.scalar(remap[just[1]], just[2])
        elif just[0] == "div":
            remap[t] = b2.div(remap[just[1]], just[2])
    b2.sum(remap[len(b.lines) - 1], b2.initial(n_extra))
    proof = b2.proof()
    assert proof.is_refutation()
    assert cp_check(proof, sys2).valid
    return sys2, proof


def test_restrict_untouched_variables_identity():
    rng = random.Random(30)
    sys_, proof = _random_refutation(rng)
    restricted, rsys = cp_restrict(proof, {17: 1}, sys_)
    assert len(restricted) == len(proof)
    assert cp_check(restricted, rsys).valid


def test_restrict_fuzz():
    rng = random.Random(31)
    for _ in range(60):
        sys_, proof = _random_refutation(rng)
        rho = {v: rng.randint(0, 1) for v in range(5) if rng.random() < 0.4}
        restricted, rsys = cp_restrict(proof, rho, sys_)
        res = cp_check(restricted, rsys)
        assert res.valid
        assert restricted.is_refutation()
        assert len(restricted) <= len(proof) + 3


def test_restrict_absorbs_pinned_axiom():
    sys_ = CpSystem([("a", CpLine({0: 1}, 1))], 2, {})
    b = CpBuilder(sys_)
    b.varaxiom(0)
    proof = b.proof()
    restricted, rsys = cp_restrict(proof, {0: 1}, sys_)
    assert cp_check(restricted, rsys).valid
    # the restricted line is the trivial 0 >= -1
    assert restricted.final() == CpLine({}, -1)


# -- weakening ---------------------------------------------------------------


def test_weaken_one_line_case():
    base = CpSystem([("a", CpLine({0: 1}, 1))], 1, {})
    ext = extend_with_assignments(base, [(0, 0)])
    b = CpBuilder(ext)
    b.sum(b.initial(0), b.initial(2))
    lifted, K = cp_weaken(b.proof(), base, 0, 0)
    assert K == 1
    assert lifted.final() == CpLine({0: 1}, 1)
    assert cp_check(lifted, base).valid


def test_weaken_div_padding():
    # force the K' adjustment: K=1 entering a division by 2
    base = CpSystem([("a", CpLine({0: 2, 1: 2}, 2)), ("a", CpLine({0: -2, 1: -2}, 0))], 2, {})
    ext = extend_with_assignments(base, [(1, 1)])
    b = CpBuilder(ext)
    pin = b.initial(2)            # y >= 1
    up = b.initial(3)             # -y >= -1
    l0 = b.initial(0)             # 2x + 2y >= 2
    neg = b.initial(1)            # -2x - 2y >= 0
    s = b.sum(l0, neg)            # 0 >= 2
    s = b.sum(s, b.scalar(pin, 2))  # 2y >= 4
    d = b.div(s, 2)               # y >= 2
    bad = b.sum(d, b.scalar(up, 2))  # -y >= 0
    final = b.sum(bad, pin)       # 0 >= 1
    proof = b.proof()
    assert proof.is_refutation() and cp_check(proof, ext).valid
    lifted, K = cp_weaken(proof, base, 1, 1)
    assert cp_check(lifted, base).valid
    assert len(lifted) <= WEAKEN_LENGTH_FACTOR * len(proof)
    fin = lifted.final()
    assert fin.coeffs == ({1: -K} if K else {}) and fin.bound == 1 - K


def test_weaken_requires_refutation():
    base = CpSystem([("a", CpLine({0: 1}, 1))], 1, {})
    ext = extend_with_assignments(base, [(0, 1)])
    b = CpBuilder(ext)
    b.initial(0)
    with pytest.raises(InputNotRefutation):
        cp_weaken(b.proof(), base, 0, 1)


def test_weaken_fuzz_validity_and_ratio():
    """Criterion-sized sweep lives in the acceptance module; this is the
    smoke-sized version."""
    rng = random.Random(32)
    for _ in range(50):
        sys_, proof = _random_refutation(rng)
        x = rng.randrange(5)
        bval = rng.randint(0, 1)
        ext = extend_with_assignments(sys_, [(x, bval)])
        # reuse the proof against the extended system, then mix in the pin
        b = CpBuilder(ext)
        remap = {}
        for t, (ln, just) in enumerate(proof.lines):
            if just[0] == "initial":
                remap[t] = b.initial(just[1])
            elif just[0] == "varaxiom":
                remap[t] = b.varaxiom(just[1])
            elif just[0] == "sum":
                remap[t] = b.sum(remap[just[1]], remap[just[2]])
            elif just[0] == "scalar":
                remap[t] = b.scalar(remap[just[1]], just[2])
            elif just[0] == "div":
                remap[t] = b.div(remap[just[1]], just[2])
        fin = remap[len(proof.lines) - 1]
        pin = b.initial(len(sys_.lines) if bval == 1 else len(sys_.lines) + 1)
        fin = b.sum(fin, pin)     # still 0 >= 1 plus a pin multiple
        pinned_proof = b.proof()
        res = cp_check(pinned_proof, ext)
        assert res.valid
        if not pinned_proof.is_refutation():
            continue
        lifted, K = cp_weaken(pinned_proof, sys_, x, bval)
        assert cp_check(lifted, sys_).valid
        assert len(lifted) <= WEAKEN_LENGTH_FACTOR * len(pinned_proof)


# -- branch composition --------------------------------------------------------


def _toy_vertex_system():
    # one vertex with two colours plus inequalities making both choices fail
    lines = [
        ("vertex", CpLine({0: 1, 1: 1}, 1)),
        ("a", CpLine({0: -1}, 0)),   # x0 <= 0
        ("a", CpLine({1: -1}, 0)),   # x1 <= 0
    ]
    return CpSystem(lines, 2, {})


def test_branch_compose_level_zero():
    sys_ = _toy_vertex_system()
    b = CpBuilder(sys_)
    b.sum(b.sum(b.initial(0), b.initial(1)), b.initial(2))
    proof = b.proof()
    out = cp_branch_compose(sys_, [], 2, {(): proof})
    assert out is proof


def test_branch_compose_single_level():
    sys_ = _toy_vertex_system()
    subproofs = {}
    for c in (0, 1):
        ext = extend_with_assignments(sys_, [(c, 1)])
        b = CpBuilder(ext)
        pin = b.initial(3)           # x_c >= 1
        bound = b.initial(1 + c)     # -x_c >= 0
        b.sum(pin, bound)            # 0 >= 1
        subproofs[(c,)] = b.proof()
        assert subproofs[(c,)].is_refutation()
    composed = cp_branch_compose(sys_, [[0, 1]], 2, subproofs)
    res = cp_check(composed, sys_)
    assert res.valid and composed.is_refutation()
    total_branches = sum(len(p) for p in subproofs.values())
    assert len(composed) <= 2 * WEAKEN_LENGTH_FACTOR * total_branches + 2 * 2 + 2


def test_branch_compose_missing_branch():
    sys_ = _toy_vertex_system()
    with pytest.raises(MissingBranch):
        cp_branch_compose(sys_, [[0, 1]], 2, {})


# -- counting refutations --------------------------------------------------------


def test_php_2_1():
    sys_, proof = cp_refute_php(FphpInstance.build([[0], [0]], 1))
    assert cp_check(proof, sys_).valid and proof.is_refutation()
    assert len(proof) <= 8


def test_php_complete_sweep_cubic():
    for n in range(2, 7):
        b = FphpInstance.build([list(range(n - 1))] * n, n - 1)
        sys_, proof = cp_refute_php(b)
        assert cp_check(proof, sys_).valid and proof.is_refutation()
        assert len(proof) <= 6 * (2 * n) ** 3


def test_php_matching_exists():
    with pytest.raises(MatchingExists):
        cp_refute_php(FphpInstance.build([[0], [1]], 2))


def test_php_hall_subinstance():
    # satisfckible pigeons exist, but a hidden violator makes it unsat
    b = FphpInstance.build([[0, 1], [0, 1], [0, 1], [2, 3]], 4)
    sys_, proof = cp_refute_php(b)
    assert cp_check(proof, sys_).valid and proof.is_refutation()


# -- gadget fragments and the full pipeline ---------------------------------------


def test_gadget_fragment_both_methods(k43):
    out = build_reduction(k43)
    sys_ = encode_colouring_cp(out.graph, 3)
    gadget = out.gadget_index[0]
    for method in ("ladder", "branching"):
        local_ext, fragment = cp_refute_gadget(sys_, gadget, 3, method=method)
        res = cp_check(fragment, local_ext)
        assert res.valid, method
        i, ip = gadget.pigeons
        c, cp_ = gadget.colours
        fin = fragment.final()
        assert fin.coeffs == {i * 3 + c: -1, ip * 3 + cp_: -1}
        assert fin.bound >= -1


def test_gadget_fragment_merged_variant():
    b = FphpInstance.build([[0, 1, 2], [1, 0, 3]], 4)  # labels differ at hole 0
    out = build_reduction(b)
    gadget = next(g for g in out.gadget_index if g.variant == "merged")
    sys_ = encode_colouring_cp(out.graph, 3)
    local_ext, fragment = cp_refute_gadget(sys_, gadget, 3)
    assert cp_check(fragment, local_ext).valid


def test_gadget_precondition_infeasible(k43):
    # pinning both pigeon colours and the contact colours kills the gadget
    out = build_reduction(k43)
    gadget = out.gadget_index[0]
    from colourproofs.oracle import brute_colour

    graph, local = gadget.local_graph()
    pins = {local[w]: c for w, c in gadget.precoloured}
    pins[local[gadget.pigeons[0]]] = gadget.colours[0]
    pins[local[gadget.pigeons[1]]] = gadget.colours[1]
    assert not brute_colour(graph, 3, precolouring=pins).satisfiable


def test_reduction_pipeline_minimal_unsat(k43):
    out = build_reduction(k43)
    sys_, proof = cp_refute_reduction(out)
    res = cp_check(proof, sys_)
    assert res.valid and proof.is_refutation()
    assert len(proof) <= reduction_length_bound(out)
    # 0/1 infeasibility of this system equals non-3-colourability of the
    # graph, which the colouring oracle certifies in test_reduction


def test_reduction_pipeline_rejects_satisfiable():
    b = FphpInstance.build([[0, 1, 2], [0, 3, 4]], 5)
    out = build_reduction(b)
    with pytest.raises(MatchingExists):
        cp_refute_reduction(out)


def test_cp_proof_jsonl_round_trip():
    sys_, proof = cp_refute_php(FphpInstance.build([[0], [0]], 1))
    text = cp_proof_to_jsonl(proof)
    back = cp_proof_from_jsonl(text)
    assert cp_check(back, sys_).valid
    assert cp_proof_to_jsonl(back) == text
