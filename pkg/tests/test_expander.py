import itertools
import random

import numpy as np
import pytest

from colourproofs.errors import TooLarge
from colourproofs.expander import (boundary, check_boundary_expansion,
                                   double_and_delete, sample_left_regular,
                                   sample_verified_expander)
from colourproofs.graphs import FphpInstance, Graph


def test_singleton_boundary():
    b = FphpInstance.build([[0, 1, 2], [2, 3, 4]], 5)
    assert boundary(b, [0]) == {0, 1, 2}
    assert boundary(b, [1]) == {2, 3, 4}
    assert boundary(b, [0, 1]) == {0, 1, 3, 4}


def test_identical_neighbourhoods_empty_boundary():
    b = FphpInstance.build([[0, 1, 2], [0, 1, 2]], 3)
    assert boundary(b, [0, 1]) == set()


def test_empty_set_boundary(k43):
    assert boundary(k43, []) == set()


def test_disjoint_matchings_expand():
    b = FphpInstance.build([[0, 1, 2], [3, 4, 5]], 6)
    report = check_boundary_expansion(b, 1.0, 3.0)
    assert report.holds and report.witness is None


def test_identical_pair_fails_delta2():
    b = FphpInstance.build([[0, 1, 2], [0, 1, 2]], 3)
    report = check_boundary_expansion(b, 1.0, 2.0)
    assert not report.holds
    assert report.witness == ((0, 1), 0)


def test_exhaustive_bound_guard():
    rows = [[0, 1, 2]] * 25
    with pytest.raises(TooLarge):
        check_boundary_expansion(FphpInstance.build(rows, 3), 0.5, 1.5)


def _boundary_bitmask(b, subset):
    """Independent reimplementation: per-hole pigeon bitmasks, popcount 1."""
    masks = np.zeros(b.n_holes, dtype=np.int64)
    for i in subset:
        for j in b.neighbours[i]:
            masks[j] += 1
    return int((masks == 1).sum())


def test_expansion_agrees_with_bitmask_reimplementation():
    rng = random.Random(4)
    for _ in range(30):
        n = rng.randint(2, 12)
        h = rng.randint(3, 8)
        b = sample_left_regular(n, h, 3, rng.randint(0, 10**6))
        for size in range(1, min(n, 4) + 1):
            for subset in itertools.combinations(range(n), size):
                assert len(boundary(b, subset)) == _boundary_bitmask(b, subset)


def test_double_and_delete_triangle():
    h = Graph.complete(3)
    b = double_and_delete(h, 0, 3)
    assert b.n_pigeons == 3
    # 2 surviving shared holes plus one private pad for pigeon 0 and two each
    # for the neighbours of the deleted vertex
    assert b.n_holes == 2 + 1 + 2 + 2
    assert b.left_degree == 3
    assert max(b.right_degrees()) <= 2


def test_double_and_delete_sizes():
    for n in (4, 5, 6):
        h = Graph.cycle(n)
        b = double_and_delete(h, 1, 3)
        assert b.n_pigeons == n
        shared = [j for j, d in enumerate(b.right_degrees()) if d > 1]
        assert len(shared) <= n - 1


def test_double_preserves_boundary_up_to_padding():
    # padding holes are private, so the boundary of S in the double contains
    # the double-cover boundary (H-boundary minus the deleted copy) and each
    # padded pigeon in S contributes its private holes
    rng = random.Random(5)
    for n in range(3, 8):
        edges = [(i, (i + 1) % n) for i in range(n)]
        h = Graph.build(n, edges)
        b = double_and_delete(h, 0, 3)
        for size in (1, 2):
            for subset in itertools.combinations(range(n), size):
                got = boundary(b, subset)
                plain = {v for v in range(n)
                         if v != 0 and len(set(h.neighbours(v)) & set(subset)) == 1}
                assert {j for j in got if b.right_degrees()[j] > 1} == \
                    {j for j in got if j < n - 1 and b.right_degrees()[j] > 1}
                assert len(got) >= len(plain)


def test_double_never_multi_edges():
    h = Graph.complete(4)
    b = double_and_delete(h, 2, 3)
    for row in b.neighbours:
        assert len(set(row)) == len(row)


def test_sample_determinism():
    a = sample_left_regular(8, 7, 3, 42)
    b = sample_left_regular(8, 7, 3, 42)
    assert a == b
    c = sample_left_regular(8, 7, 3, 43)
    assert a != c


def test_sample_rejects_too_few_holes():
    with pytest.raises(ValueError):
        sample_left_regular(3, 2, 3, 0)


def test_verified_expander_8_7():
    found = sample_verified_expander(8, 7, 3, 0.25, 1.5, seed=3, max_tries=200)
    assert found is not None
    b, tries = found
    assert tries >= 1
    assert check_boundary_expansion(b, 0.25, 1.5).holds


def test_half_alpha_regime_unattainable_at_this_density():
    # at 8 pigeons over 7 holes, 4-subsets put 12 edge slots into 7 holes, so
    # boundaries of 5 basically never happen; rejection sampling must give up
    assert sample_verified_expander(8, 7, 3, 0.5, 1.5, seed=0, max_tries=300) is None
