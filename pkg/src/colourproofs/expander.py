"""Bipartite instances with verified boundary expansion.

The boundary of a pigeon set S is the set of holes with exactly one
neighbour in S.  An (alpha, delta) boundary expander guarantees
|boundary(S)| >= delta * |S| - 1 for every nonempty S of size at most
alpha * n_pigeons; the checker verifies this exhaustively, which is the
honest thing to do at desk scale.

There is also the doubling construction: take two copies of a simple graph
as the two sides of a bipartite graph, delete one right vertex, and pad the
deficient pigeons with fresh private holes.  Padding preserves left-regularity
and can only grow boundaries, so verified expansion survives it.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import List, Optional, Set, Tuple

from .errors import TooLarge
from .graphs import FphpInstance, Graph

EXHAUSTIVE_PIGEON_BOUND = 20


@dataclass
class ExpansionReport:
    alpha: float
    delta: float
    holds: bool
    witness: Optional[Tuple[Tuple[int, ...], int]]  # (offending set, boundary size)


def boundary(b: FphpInstance, pigeons) -> Set[int]:
    """Holes seeing exactly one pigeon of the set."""
    count = {}
    for i in pigeons:
        for j in b.neighbours[i]:
            count[j] = count.get(j, 0) + 1
    return {j for j, c in count.items() if c == 1}


def check_boundary_expansion(b: FphpInstance, alpha: float, delta: float,
                             exhaustive_bound: int = EXHAUSTIVE_PIGEON_BOUND) -> ExpansionReport:
    """Exhaustively checks |boundary(S)| >= delta*|S| - 1 over all nonempty
    S with |S| <= alpha * n_pigeons; the first violation (subsets ordered by
    size, then lexicographically) becomes the witness."""
    if b.n_pigeons > exhaustive_bound:
        raise TooLarge(f"{b.n_pigeons} pigeons exceeds the exhaustive bound {exhaustive_bound}")
    max_size = int(alpha * b.n_pigeons)
    for size in range(1, max_size + 1):
        need = delta * size - 1
        for subset in itertools.combinations(range(b.n_pigeons), size):
            got = len(boundary(b, subset))
            if got < need:
                return ExpansionReport(alpha, delta, False, (subset, got))
    return ExpansionReport(alpha, delta, True, None)


def double_and_delete(h: Graph, u_hat: int, k: int) -> FphpInstance:
    """Bipartite double cover of a simple graph minus one right copy, padded
    with fresh private holes back to left degree k."""
    if h.max_degree() > k:
        raise ValueError(f"graph degree {h.max_degree()} exceeds k={k}")
    if not (0 <= u_hat < h.n_vertices):
        raise ValueError("deleted vertex out of range")
    # right copy of vertex v (v != u_hat) gets hole id v, skipping u_hat
    hole_of = {}
    nxt = 0
    for v in range(h.n_vertices):
        if v != u_hat:
            hole_of[v] = nxt
            nxt += 1
    rows: List[List[int]] = []
    for u in range(h.n_vertices):
        rows.append(sorted(hole_of[v] for v in h.neighbours(u) if v != u_hat))
    for row in rows:
        while len(row) < k:
            row.append(nxt)
            nxt += 1
    return FphpInstance.build(rows, nxt)


def sample_left_regular(n_pigeons: int, n_holes: int, k: int, seed: int) -> FphpInstance:
    """Uniform k-subsets of holes per pigeon, listed ascending; deterministic
    in the seed."""
    if n_holes < k:
        raise ValueError(f"need at least k={k} holes, got {n_holes}")
    rng = random.Random(seed)
    rows = [tuple(sorted(rng.sample(range(n_holes), k))) for _ in range(n_pigeons)]
    return FphpInstance(n_pigeons, n_holes, tuple(rows))


def sample_verified_expander(n_pigeons: int, n_holes: int, k: int, alpha: float,
                             delta: float, seed: int, max_tries: int = 2000
                             ) -> Optional[Tuple[FphpInstance, int]]:
    """Rejection-sample left-regular instances until the expansion check
    passes; returns (instance, tries used) or None."""
    for t in range(max_tries):
        b = sample_left_regular(n_pigeons, n_holes, k, seed + t)
        if check_boundary_expansion(b, alpha, delta).holds:
            return b, t + 1
    return None
