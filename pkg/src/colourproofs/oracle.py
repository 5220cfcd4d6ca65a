"""Independent brute-force ground truth.

Everything in here is deliberately plain backtracking with explicit budgets,
kept free of the cleverness it is meant to check.  Every successful verdict
re-verifies its witness by direct constraint evaluation before returning.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .encodings import CpSystem, PolySystem
from .errors import BudgetExceeded
from .fields import FieldElement
from .graphs import FphpInstance, Graph

DEFAULT_BUDGET = 2_000_000


@dataclass
class OracleVerdict:
    satisfiable: bool
    witness: Optional[object]
    nodes_explored: int


def _check_colouring(g: Graph, k: int, colouring: Sequence[int]) -> bool:
    if len(colouring) != g.n_vertices:
        return False
    if any(not (0 <= c < k) for c in colouring):
        return False
    return all(colouring[u] != colouring[v] for u, v in g.edges)


def brute_colour(g: Graph, k: int, precolouring: Optional[Dict[int, int]] = None,
                 budget: int = DEFAULT_BUDGET) -> OracleVerdict:
    """Exact k-colourability by backtracking with forward checking.

    Assignments prune neighbour domains; emptied domains backtrack and
    singleton domains propagate without branching.  Branch vertices are
    picked most-constrained-first (smallest remaining domain, preferring
    vertices touching the coloured region, then highest degree, then lowest
    id).  An optional partial colouring is respected.
    """
    n = g.n_vertices
    adj = [sorted(s) for s in g.adjacency()]
    domain: List[set] = [set(range(k)) for _ in range(n)]
    colour: List[Optional[int]] = [None] * n
    trail: List[Tuple[int, int, int]] = []  # (kind, vertex, colour); kind 0 = assign, 1 = prune
    nodes = 0

    def assign(v: int, c: int, forced_queue: List[int]) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"colouring search passed {budget} nodes")
        colour[v] = c
        trail.append((0, v, c))
        for u in adj[v]:
            if colour[u] is None:
                if c in domain[u]:
                    domain[u].discard(c)
                    trail.append((1, u, c))
                    if not domain[u]:
                        return False
                    if len(domain[u]) == 1:
                        forced_queue.append(u)
            elif colour[u] == c:
                return False
        return True

    def propagate(queue: List[int]) -> bool:
        while queue:
            v = queue.pop()
            if colour[v] is None:
                if not domain[v]:
                    return False
                if not assign(v, next(iter(domain[v])), queue):
                    return False
        return True

    def rewind(mark: int):
        while len(trail) > mark:
            kind, v, c = trail.pop()
            if kind == 0:
                colour[v] = None
            else:
                domain[v].add(c)

    queue: List[int] = []
    if precolouring:
        for v, c in precolouring.items():
            if not (0 <= c < k):
                return OracleVerdict(False, None, 0)
        for v, c in sorted(precolouring.items()):
            if colour[v] is None:
                if c not in domain[v] or not assign(v, c, queue):
                    return OracleVerdict(False, None, nodes)
            elif colour[v] != c:
                return OracleVerdict(False, None, nodes)
        if not propagate(queue):
            return OracleVerdict(False, None, nodes)

    def components(active: List[int]) -> List[List[int]]:
        # connected components of the uncoloured subgraph
        remaining = set(v for v in active if colour[v] is None)
        comps = []
        while remaining:
            start = min(remaining)
            comp = [start]
            remaining.discard(start)
            frontier = [start]
            while frontier:
                v = frontier.pop()
                for u in adj[v]:
                    if u in remaining:
                        remaining.discard(u)
                        comp.append(u)
                        frontier.append(u)
            comps.append(comp)
        comps.sort(key=len)
        return comps

    def pick(comp: List[int]) -> Optional[int]:
        best, best_key = None, None
        for v in comp:
            if colour[v] is not None:
                continue
            touching = any(colour[u] is not None for u in adj[v])
            key = (-len(domain[v]), touching, len(adj[v]), -v)
            if best_key is None or key > best_key:
                best, best_key = v, key
        return best

    def solve(active: List[int]) -> bool:
        # independent components never multiply each other's search
        for comp in components(active):
            if not solve_component(comp):
                return False
        return True

    def solve_component(comp: List[int]) -> bool:
        v = pick(comp)
        if v is None:
            return True
        for c in sorted(domain[v]):
            mark = len(trail)
            q: List[int] = []
            if assign(v, c, q) and propagate(q):
                if solve([u for u in comp if colour[u] is None]):
                    return True
            rewind(mark)
        return False

    if solve(list(range(n))):
        witness = tuple(colour)  # type: ignore[arg-type]
        assert _check_colouring(g, k, witness)
        return OracleVerdict(True, witness, nodes)
    return OracleVerdict(False, None, nodes)


def _check_fphp(b: FphpInstance, mapping: Sequence[int]) -> bool:
    if len(mapping) != b.n_pigeons:
        return False
    used = set()
    for i, j in enumerate(mapping):
        if j not in b.neighbours[i] or j in used:
            return False
        used.add(j)
    return True


def brute_fphp(b: FphpInstance, budget: int = DEFAULT_BUDGET) -> OracleVerdict:
    """Exact satisfiability of the constrained one-to-one mapping."""
    used = set()
    mapping: List[Optional[int]] = [None] * b.n_pigeons
    nodes = 0

    def solve(i: int) -> bool:
        nonlocal nodes
        if i == b.n_pigeons:
            return True
        for j in b.neighbours[i]:
            if j in used:
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"matching search passed {budget} nodes")
            used.add(j)
            mapping[i] = j
            if solve(i + 1):
                return True
            used.discard(j)
            mapping[i] = None
        return False

    if solve(0):
        witness = tuple(mapping)  # type: ignore[arg-type]
        assert _check_fphp(b, witness)
        return OracleVerdict(True, witness, nodes)
    return OracleVerdict(False, None, nodes)


def complete_left_matching(b: FphpInstance) -> Optional[Dict[int, int]]:
    """Augmenting-path matching; returns pigeon -> hole map or None."""
    match_hole: Dict[int, int] = {}

    def augment(i: int, seen: set) -> bool:
        for j in b.neighbours[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in match_hole or augment(match_hole[j], seen):
                match_hole[j] = i
                return True
        return False

    for i in range(b.n_pigeons):
        if not augment(i, set()):
            return None
    return {i: j for j, i in match_hole.items()}


def hall_violator(b: FphpInstance) -> Optional[List[int]]:
    """A pigeon set S with |N(S)| < |S| when no complete matching exists.

    Standard construction: pigeons reachable by alternating paths from an
    unmatched pigeon.
    """
    match_hole: Dict[int, int] = {}
    match_pigeon: Dict[int, int] = {}

    def augment(i: int, seen: set) -> bool:
        for j in b.neighbours[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in match_hole or augment(match_hole[j], seen):
                match_hole[j] = i
                match_pigeon[i] = j
                return True
        return False

    free = None
    for i in range(b.n_pigeons):
        if not augment(i, set()):
            free = i
    if free is None:
        return None
    reach_p = {free}
    reach_h: set = set()
    frontier = [free]
    while frontier:
        nxt = []
        for i in frontier:
            for j in b.neighbours[i]:
                if j not in reach_h:
                    reach_h.add(j)
                    owner = match_hole.get(j)
                    if owner is not None and owner not in reach_p:
                        reach_p.add(owner)
                        nxt.append(owner)
        frontier = nxt
    violator = sorted(reach_p)
    assert len(reach_h) < len(violator)
    return violator


def _poly_backtrack(sys: PolySystem, domain: List[FieldElement], budget: int) -> OracleVerdict:
    order = list(range(sys.n_vars))
    axioms = [a.poly for a in sys.axioms if not a.poly.is_zero()]
    by_last_var: List[List] = [[] for _ in range(sys.n_vars)]
    always: List = []
    for p in axioms:
        vs = p.variables()
        if vs:
            by_last_var[max(vs)].append(p)
        else:
            always.append(p)
    for p in always:
        if not p.evaluate({}).is_zero():
            return OracleVerdict(False, None, 0)
    assignment: Dict[int, FieldElement] = {}
    nodes = 0

    def solve(idx: int) -> bool:
        nonlocal nodes
        if idx == sys.n_vars:
            return True
        v = order[idx]
        for val in domain:
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"assignment search passed {budget} nodes")
            assignment[v] = val
            if all(p.evaluate(assignment).is_zero() for p in by_last_var[v]):
                if solve(idx + 1):
                    return True
            del assignment[v]
        return False

    if solve(0):
        witness = dict(assignment)
        for p in axioms:
            assert p.evaluate(witness).is_zero()
        return OracleVerdict(True, witness, nodes)
    return OracleVerdict(False, None, nodes)


def poly_system_satisfiable_01(sys: PolySystem, budget: int = DEFAULT_BUDGET) -> OracleVerdict:
    """Exhaustive search for a common zero over {0,1}^n."""
    f = sys.field
    return _poly_backtrack(sys, [f.zero, f.one], budget)


def poly_system_satisfiable_roots(sys: PolySystem, budget: int = DEFAULT_BUDGET) -> OracleVerdict:
    """Exhaustive search for a common zero over the k-th roots of unity."""
    f = sys.field
    if f.kth_root is None:
        raise ValueError("system's field holds no root of unity")
    domain = [f.kth_root**j for j in range(f.k)]
    return _poly_backtrack(sys, domain, budget)


def cp_system_satisfiable_01(sys: CpSystem, budget: int = DEFAULT_BUDGET) -> OracleVerdict:
    """Exhaustive 0/1 feasibility for a CP system."""
    by_last_var: List[List] = [[] for _ in range(sys.n_vars)]
    for _, ln in sys.lines:
        if ln.coeffs:
            by_last_var[max(ln.coeffs)].append(ln)
        elif ln.bound > 0:
            return OracleVerdict(False, None, 0)
    assignment: Dict[int, int] = {}
    nodes = 0

    def solve(v: int) -> bool:
        nonlocal nodes
        if v == sys.n_vars:
            return True
        for val in (0, 1):
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"assignment search passed {budget} nodes")
            assignment[v] = val
            if all(ln.satisfied_by(assignment) for ln in by_last_var[v]):
                if solve(v + 1):
                    return True
            del assignment[v]
        return False

    if solve(0):
        witness = dict(assignment)
        for _, ln in sys.lines:
            assert ln.satisfied_by(witness)
        return OracleVerdict(True, witness, nodes)
    return OracleVerdict(False, None, nodes)


def check_claim_gadget(gadget, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff the gadget excludes exactly its designated colour pair.

    For every pair (b, b') of pigeon colours, an extension of the gadget's
    pre-colouring must exist exactly when (b, b') differs from the excluded
    pair.
    """
    graph, local = gadget.local_graph()
    k = gadget.k
    pins = {local[w]: c for w, c in gadget.precoloured}
    for b in range(k):
        for bp in range(k):
            pre = dict(pins)
            pre[local[gadget.pigeons[0]]] = b
            pre[local[gadget.pigeons[1]]] = bp
            verdict = brute_colour(graph, k, precolouring=pre, budget=budget)
            expected = (b, bp) != gadget.colours
            if verdict.satisfiable != expected:
                return False
    return True
