"""Reduction from constrained pigeon-hole instances to graph colouring.

The construction has three layers:

  1. an injectivity gadget per colliding flight pair, whose legal colourings
     exclude exactly one pair of pigeon colours;
  2. the pre-coloured union of all gadgets over shared pigeon vertices;
  3. a chain of overlapping k-cliques that absorbs every pre-coloured vertex,
     so the final graph carries no pre-colouring at all.

It also builds the degree-2 substitution that rewrites colouring variables of
the final graph as quadratic polynomials in pigeon-hole variables, which is
what lets polynomial-calculus proofs be transported back to the pigeon-hole
side.

Conventions kept fixed for reproducible output: colours are 0..k-1
internally; pigeon pairs are visited in lexicographic order and shared holes
in ascending order; gadget-internal ids come after the pigeon block in
construction order (left clique, right clique, pre-coloured pair); chain
vertices sit in one block at the end, slot t carrying implied colour t mod k.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .encodings import colour_var, fphp_var
from .errors import GadgetInfeasible, InvalidColour
from .fields import FieldSpec
from .graphs import FphpInstance, Graph
from .polynomials import MONO_ONE, Polynomial

# declared constants for the size guarantees checked on every build,
# valid whenever the instance's right degree is at most 3k
VERTEX_COUNT_FACTOR = 24   # |V(G)| <= 24 * k^4 * n_pigeons
MAX_DEGREE_FACTOR = 3      # max degree <= 3 * k^2


@dataclass(frozen=True)
class GadgetLayout:
    """One injectivity gadget: two pigeon anchors, two k-cliques, and a
    pre-coloured contact vertex per clique."""

    pigeons: Tuple[int, int]
    colours: Tuple[int, int]
    hole: int
    left_clique: Tuple[int, ...]
    right_clique: Tuple[int, ...]
    precoloured: Tuple[Tuple[int, int], Tuple[int, int]]
    variant: str  # "edge" when the excluded colours agree, else "merged"
    k: int

    def internal_vertices(self) -> List[int]:
        seen = dict.fromkeys(self.left_clique)
        seen.update(dict.fromkeys(self.right_clique))
        seen[self.precoloured[0][0]] = None
        seen[self.precoloured[1][0]] = None
        return list(seen)

    def vertices(self) -> List[int]:
        return [self.pigeons[0], self.pigeons[1]] + self.internal_vertices()

    def edges(self) -> List[Tuple[int, int]]:
        i, ip = self.pigeons
        w, wp = self.precoloured[0][0], self.precoloured[1][0]
        k = self.k
        out = [(i, self.left_clique[0]), (ip, self.right_clique[0])]
        for a, b in itertools.combinations(self.left_clique, 2):
            out.append((a, b))
        for a, b in itertools.combinations(self.right_clique, 2):
            out.append((a, b))
        for t in range(1, k - 1):
            out.append((w, self.left_clique[t]))
            out.append((wp, self.right_clique[t]))
        if self.variant == "edge":
            out.append((self.left_clique[k - 1], self.right_clique[k - 1]))
        return out

    def local_graph(self) -> Tuple[Graph, Dict[int, int]]:
        verts = self.vertices()
        local = {g: i for i, g in enumerate(verts)}
        graph = Graph.build(len(verts), [(local[u], local[v]) for u, v in self.edges()])
        return graph, local


def build_gadget(i: int, ip: int, c: int, cp: int, k: int, fresh_ids) -> GadgetLayout:
    """Gadget excluding the simultaneous choice of colour c by pigeon i and
    colour c' by pigeon i'.  ``fresh_ids`` yields unused vertex ids."""
    if i == ip:
        raise ValueError("gadget needs two distinct pigeons")
    if not (0 <= c < k) or not (0 <= cp < k):
        raise InvalidColour(f"colours ({c},{cp}) outside 0..{k - 1}")
    left = tuple(next(fresh_ids) for _ in range(k))
    if c == cp:
        right = tuple(next(fresh_ids) for _ in range(k))
        variant = "edge"
    else:
        right = tuple(next(fresh_ids) for _ in range(k - 1)) + (left[k - 1],)
        variant = "merged"
    w = next(fresh_ids)
    wp = next(fresh_ids)
    return GadgetLayout((i, ip), (c, cp), -1, left, right, ((w, c), (wp, cp)), variant, k)


@dataclass
class PrecolouredGraph:
    graph: Graph
    precolouring: Dict[int, int]
    pigeon_vertices: List[int]
    gadget_index: List[GadgetLayout]


def collision_list(b: FphpInstance) -> List[Tuple[int, int, int, int, int]]:
    """All (i, i', c, c', j) with i < i' whose c-th and c'-th edges meet in
    hole j, in construction order."""
    out = []
    for i in range(b.n_pigeons):
        for ip in range(i + 1, b.n_pigeons):
            shared = sorted(set(b.neighbours[i]) & set(b.neighbours[ip]))
            for j in shared:
                out.append((i, ip, b.edge_label(i, j), b.edge_label(ip, j), j))
    return out


def build_precoloured_graph(b: FphpInstance) -> PrecolouredGraph:
    """Union of one gadget per colliding flight pair, sharing only the pigeon
    vertices.  The result still carries a pre-colouring; the chain in
    build_reduction removes it."""
    k = b.left_degree
    fresh = itertools.count(b.n_pigeons)
    gadgets = []
    for i, ip, c, cp, j in collision_list(b):
        g = build_gadget(i, ip, c, cp, k, fresh)
        gadgets.append(GadgetLayout(g.pigeons, g.colours, j, g.left_clique,
                                    g.right_clique, g.precoloured, g.variant, k))
    n = next(fresh)
    edges = [e for g in gadgets for e in g.edges()]
    graph = Graph.build(n, edges)
    precolouring = {}
    for g in gadgets:
        for w, c in g.precoloured:
            precolouring[w] = c
    return PrecolouredGraph(graph, precolouring, list(range(b.n_pigeons)), gadgets)


def build_precolour_chain(n_precoloured: int, k: int) -> Tuple[Graph, int]:
    """Chain of M = k * n_precoloured + k vertices where every window of k
    consecutive vertices is a clique; colours are forced by residue once the
    first window is coloured."""
    m = k * n_precoloured + k
    edges = []
    for t in range(m - k + 1):
        for a, bb in itertools.combinations(range(t, t + k), 2):
            edges.append((a, bb))
    return Graph.build(m, edges), m


class ChainSlotAllocator:
    """Hands out unused chain slots t with t = colour (mod k), ascending."""

    def __init__(self, m: int, k: int):
        self.m = m
        self.k = k
        self.next_for_colour = list(range(k))
        self.assigned: Dict[int, int] = {}

    def take(self, colour: int) -> int:
        t = self.next_for_colour[colour]
        if t >= self.m:
            raise GadgetInfeasible("chain too short; allocator invariant broken")
        self.next_for_colour[colour] = t + self.k
        return t


@dataclass
class ReductionOutput:
    """The final colouring instance together with every map the proof
    machinery needs to translate between the two sides."""

    graph: Graph
    instance: FphpInstance
    k: int
    gadget_index: List[GadgetLayout]          # gadgets in final vertex ids
    pigeon_vertex: Dict[int, int]             # pigeon -> vertex id
    chain_base: int
    chain_length: int
    chain_slots: Dict[int, int]               # final chain vertex id -> slot t

    def chain_vertex(self, t: int) -> int:
        return self.chain_base + t

    def edge_label_hole(self, i: int, c: int) -> int:
        return self.instance.neighbours[i][c]

    def chain_only_vertices(self) -> List[int]:
        used = set(self.chain_slots)
        return [self.chain_base + t for t in range(self.chain_length)
                if self.chain_base + t not in used]

    def gadget_of_vertex(self) -> Dict[int, GadgetLayout]:
        out: Dict[int, GadgetLayout] = {}
        for g in self.gadget_index:
            for v in g.internal_vertices():
                out[v] = g
        return out


def build_reduction(b: FphpInstance) -> ReductionOutput:
    """Final graph: gadget union with every pre-coloured vertex identified
    with an unused chain slot of matching residue.  The output graph carries
    no pre-colouring."""
    k = b.left_degree
    if k < 3:
        raise ValueError("reduction needs k >= 3; smaller k degenerates the gadget cliques")
    hat = build_precoloured_graph(b)
    n_pre = len(hat.precolouring)
    chain_graph, m = build_precolour_chain(n_pre, k)

    remap: Dict[int, int] = {i: i for i in range(b.n_pigeons)}
    nxt = b.n_pigeons
    for g in hat.gadget_index:
        pre = {g.precoloured[0][0], g.precoloured[1][0]}
        for v in g.internal_vertices():
            if v not in pre:
                remap[v] = nxt
                nxt += 1
    chain_base = nxt
    alloc = ChainSlotAllocator(m, k)
    chain_slots: Dict[int, int] = {}
    for g in hat.gadget_index:
        for w, c in g.precoloured:
            t = alloc.take(c)
            remap[w] = chain_base + t
            chain_slots[chain_base + t] = t

    edges = [(remap[u], remap[v]) for u, v in hat.graph.edges]
    edges.extend((chain_base + u, chain_base + v) for u, v in chain_graph.edges)
    graph = Graph.build(chain_base + m, edges)

    gadgets_final = []
    for g in hat.gadget_index:
        gadgets_final.append(GadgetLayout(
            g.pigeons, g.colours, g.hole,
            tuple(remap[v] for v in g.left_clique),
            tuple(remap[v] for v in g.right_clique),
            ((remap[g.precoloured[0][0]], g.colours[0]),
             (remap[g.precoloured[1][0]], g.colours[1])),
            g.variant, k))

    out = ReductionOutput(graph, b, k, gadgets_final,
                          {i: i for i in range(b.n_pigeons)}, chain_base, m, chain_slots)
    _assert_size_bounds(out)
    return out


def _assert_size_bounds(out: ReductionOutput):
    b = out.instance
    k = out.k
    if max(b.right_degrees(), default=0) <= MAX_DEGREE_FACTOR * k:
        n = b.n_pigeons
        assert out.graph.n_vertices <= VERTEX_COUNT_FACTOR * k**4 * n, "vertex bound broken"
        assert out.graph.max_degree() <= MAX_DEGREE_FACTOR * k**2, "degree bound broken"


def relabel_edge_enumerations(b: FphpInstance, sigma: Tuple[int, ...]) -> FphpInstance:
    """Apply a fixed permutation of [k] to every pigeon's edge numbering:
    the edge formerly labelled c is labelled sigma[c] afterwards."""
    k = b.left_degree
    inv = [0] * k
    for c, s in enumerate(sigma):
        inv[s] = c
    rows = tuple(tuple(b.neighbours[i][inv[c]] for c in range(k)) for i in range(b.n_pigeons))
    return FphpInstance(b.n_pigeons, b.n_holes, rows)


# -- fixed gadget colourings and the variable substitution ---------------------


def fixed_gadget_colourings(g: GadgetLayout) -> Dict[Tuple[int, int], Dict[int, int]]:
    """For every admissible pigeon colour pair, the lexicographically first
    legal colouring of the gadget (backtracking over clique vertices in id
    order, colours ascending) that pins both pigeons and both pre-coloured
    vertices.  Exactly k^2 - 1 entries."""
    k = g.k
    i, ip = g.pigeons
    (w, c), (wp, cp) = g.precoloured
    order = sorted(set(g.left_clique) | set(g.right_clique))
    graph, local = g.local_graph()
    adj = graph.adjacency()
    tables: Dict[Tuple[int, int], Dict[int, int]] = {}
    for b in range(k):
        for bp in range(k):
            if (b, bp) == g.colours:
                continue
            colouring = {local[i]: b, local[ip]: bp, local[w]: c, local[wp]: cp}

            def place(idx: int) -> bool:
                if idx == len(order):
                    return True
                v = local[order[idx]]
                for col in range(k):
                    if any(colouring.get(u) == col for u in adj[v]):
                        continue
                    colouring[v] = col
                    if place(idx + 1):
                        return True
                    del colouring[v]
                return False

            if not place(0):
                raise GadgetInfeasible(
                    f"no colouring for admissible pair {(b, bp)} of gadget {g.pigeons}")
            back = {glob: colouring[loc] for glob, loc in local.items()}
            tables[(b, bp)] = back
    return tables


def pc_substitution_map(b: FphpInstance, out: ReductionOutput,
                        f: FieldSpec) -> Dict[int, Polynomial]:
    """Image of every colouring variable of the final graph as a polynomial of
    degree at most 2 over the pigeon-hole variables.

    Pigeon-vertex variables rename to the matching pigeon-hole variable;
    gadget-internal variables sum the quadratic monomials of the colour pairs
    whose fixed colouring gives this vertex this colour; chain vertices used
    by no gadget take the constants implied by their slot residue.
    """
    k = out.k
    cap = "boolean"
    one = f.one
    images: Dict[int, Polynomial] = {}

    for i in range(b.n_pigeons):
        for j in range(k):
            images[colour_var(out.pigeon_vertex[i], j, k)] = Polynomial.variable(
                f, cap, fphp_var(i, j, k))

    for g in out.gadget_index:
        tables = fixed_gadget_colourings(g)
        i, ip = g.pigeons
        for v in g.internal_vertices():
            for j in range(k):
                terms = []
                for (bb, bp), table in tables.items():
                    if table[v] == j:
                        mono = tuple(sorted(((fphp_var(i, bb, k), 1),
                                             (fphp_var(ip, bp, k), 1))))
                        terms.append((mono, one))
                images[colour_var(v, j, k)] = Polynomial.from_terms(f, cap, terms)

    for v in out.chain_only_vertices():
        t = v - out.chain_base
        for j in range(k):
            images[colour_var(v, j, k)] = (
                Polynomial.one(f, cap) if t % k == j else Polynomial.zero(f, cap))

    return images
