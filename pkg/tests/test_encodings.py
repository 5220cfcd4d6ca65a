import itertools
import random

import pytest

from colourproofs.encodings import (CpLine, cp_line_from_text, cp_line_to_text,
                                    cp_system_from_text, cp_system_to_opb,
                                    cp_system_to_text, encode_colouring01,
                                    encode_colouring_cp, encode_colouring_roots,
                                    encode_fphp, poly_system_from_text,
                                    poly_system_to_text, roots_substitution)
from colourproofs.errors import MissingRoot
from colourproofs.fields import FieldSpec, field_with_kth_root
from colourproofs.graphs import FphpInstance, Graph
from colourproofs.oracle import (brute_colour, brute_fphp, cp_system_satisfiable_01,
                                 poly_system_satisfiable_01,
                                 poly_system_satisfiable_roots)
from colourproofs.polynomials import Polynomial


def test_k4_01_counts(gf2):
    sys_ = encode_colouring01(Graph.complete(4), 3, gf2)
    tags = [a.tag for a in sys_.axioms]
    assert tags.count("vertex") == 4
    assert tags.count("uniqueness") == 12
    assert tags.count("edge") == 18
    assert tags.count("boolean") == 12
    assert sys_.n_vars == 12


def test_single_vertex_k1(gf2):
    sys_ = encode_colouring01(Graph.build(1, []), 1, gf2)
    polys = [a for a in sys_.axioms if a.tag == "vertex"]
    assert len(polys) == 1
    assert poly_system_satisfiable_01(sys_).satisfiable


def test_triangle_k2_unsat(gf2):
    sys_ = encode_colouring01(Graph.complete(3), 2, gf2)
    assert not poly_system_satisfiable_01(sys_).satisfiable


def test_k4_roots_counts(gf4):
    sys_ = encode_colouring_roots(Graph.complete(4), 3, gf4)
    assert len(sys_.axioms) == 10
    assert sys_.n_vars == 4


def test_roots_requires_root(gf2):
    with pytest.raises(MissingRoot):
        encode_colouring_roots(Graph.complete(3), 3, gf2)


def test_k4_cp_counts():
    sys_ = encode_colouring_cp(Graph.complete(4), 3)
    assert len(sys_.lines) == 34


def test_single_edge_k1_cp_infeasible():
    sys_ = encode_colouring_cp(Graph.build(2, [(0, 1)]), 1)
    assert not cp_system_satisfiable_01(sys_).satisfiable


def test_empty_graph_cp_feasible():
    sys_ = encode_colouring_cp(Graph.build(2, []), 2)
    assert cp_system_satisfiable_01(sys_).satisfiable


def test_fphp_2_1_unsat(gf2):
    b = FphpInstance.build([[0], [0]], 1)
    sys_ = encode_fphp(b, gf2)
    assert not poly_system_satisfiable_01(sys_).satisfiable


def test_fphp_2_2_sat(gf2):
    b = FphpInstance.build([[0, 1], [0, 1]], 2)
    assert poly_system_satisfiable_01(encode_fphp(b, gf2)).satisfiable


def test_fphp_oracle_equivalence_sweep(gf2):
    # every left-regular instance with <= 4 pigeons over 3 holes, k <= 3
    holes3 = list(itertools.permutations(range(3)))
    rng = random.Random(0)
    cases = [FphpInstance.build(rows, 3)
             for rows in itertools.product(holes3, repeat=2)]
    cases += [FphpInstance.build([rng.choice(holes3) for _ in range(4)], 3)
              for _ in range(25)]
    for b in cases:
        enc = poly_system_satisfiable_01(encode_fphp(b, gf2))
        assert enc.satisfiable == brute_fphp(b).satisfiable


def test_encoding_bridge_small(gf4):
    """0/1 solutions map to root-point solutions through the substitution and
    satisfiability always agrees between the encodings."""
    for g in (Graph.cycle(5), Graph.complete(3), Graph.complete(4)):
        sys01 = encode_colouring01(g, 3, gf4)
        sysroots = encode_colouring_roots(g, 3, gf4)
        v01 = poly_system_satisfiable_01(sys01)
        vroots = poly_system_satisfiable_roots(sysroots)
        colourable = brute_colour(g, 3).satisfiable
        assert v01.satisfiable == vroots.satisfiable == colourable
        if v01.satisfiable:
            images = roots_substitution(g, 3, gf4)
            root_point = {v: images[v].evaluate(v01.witness) for v in range(g.n_vertices)}
            for a in sysroots.axioms:
                if not a.poly.is_zero():
                    assert a.poly.evaluate(root_point).is_zero()


def test_roots_substitution_point_images(gf4):
    g = Graph.build(1, [])
    images = roots_substitution(g, 3, gf4)
    w = gf4.kth_root
    # x_{v,2} = 1, others 0 sends y_v to w^2
    point = {0: gf4.zero, 1: gf4.zero, 2: gf4.one}
    assert images[0].evaluate(point) == w**2


def test_var_names(gf2):
    sys_ = encode_colouring01(Graph.build(2, [(0, 1)]), 2, gf2)
    assert sys_.var_names[0] == "x[0,1]"
    assert sys_.var_names[3] == "x[1,2]"
    b = FphpInstance.build([[2, 0]], 3)
    fsys = encode_fphp(b, gf2)
    assert fsys.var_names[0] == "p[0,2]"
    assert fsys.var_names[1] == "p[0,0]"


def test_poly_system_text_round_trip(gf2, gf4):
    for sys_ in (encode_colouring01(Graph.complete(3), 3, gf2),
                 encode_colouring_roots(Graph.cycle(4), 3, gf4),
                 encode_fphp(FphpInstance.build([[0, 1], [1, 0]], 2), gf2)):
        text = poly_system_to_text(sys_)
        back = poly_system_from_text(text)
        assert poly_system_to_text(back) == text
        assert [a.tag for a in back.axioms] == [a.tag for a in sys_.axioms]
        for a, b in zip(back.axioms, sys_.axioms):
            assert a.poly == b.poly and a.nominal_degree == b.nominal_degree


def test_cp_text_round_trip():
    line = CpLine({0: 2, 3: -1}, -4)
    assert cp_line_from_text(cp_line_to_text(line)) == line
    sys_ = encode_colouring_cp(Graph.complete(3), 2)
    text = cp_system_to_text(sys_)
    back = cp_system_from_text(text)
    assert cp_system_to_text(back) == text


def test_opb_export():
    sys_ = encode_colouring_cp(Graph.build(2, [(0, 1)]), 2)
    opb = cp_system_to_opb(sys_)
    # 2 vertex sums + 2 colour-pair exclusions + 2 edge exclusions
    assert opb.splitlines()[0] == "* #variable= 4 #constraint= 6"
    assert all(ln.endswith(";") for ln in opb.splitlines()[1:])
