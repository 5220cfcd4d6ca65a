"""Simple graphs and constrained pigeon-hole instances, with text I/O.

Graphs use the DIMACS edge format (1-indexed).  Pigeon-hole instances use a
small text format:

    fphp <n_pigeons> <n_holes> <k>
    <hole> <hole> ... <hole>     (one line per pigeon, 0-indexed, ordered)

The order of a pigeon's hole list is meaningful: position c is the pigeon's
c-th edge, and the reduction turns that position into a colour.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Set, Tuple


def _norm_edge(u: int, v: int) -> Tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: FrozenSet[Tuple[int, int]]

    @classmethod
    def build(cls, n_vertices: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        es = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise ValueError(f"edge ({u},{v}) out of range")
            es.add(_norm_edge(u, v))
        return cls(n_vertices, frozenset(es))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls.build(n, [(u, v) for u in range(n) for v in range(u + 1, n)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.build(n, [(i, (i + 1) % n) for i in range(n)])

    def sorted_edges(self) -> List[Tuple[int, int]]:
        return sorted(self.edges)

    def neighbours(self, v: int) -> Set[int]:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out

    def adjacency(self) -> List[Set[int]]:
        adj: List[Set[int]] = [set() for _ in range(self.n_vertices)]
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def max_degree(self) -> int:
        return max((len(n) for n in self.adjacency()), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self.edges


def graph_to_dimacs(g: Graph) -> str:
    lines = [f"p edge {g.n_vertices} {len(g.edges)}"]
    for u, v in g.sorted_edges():
        lines.append(f"e {u + 1} {v + 1}")
    return "\n".join(lines) + "\n"


def graph_from_dimacs(text: str) -> Graph:
    n = None
    edges = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        toks = line.split()
        if toks[0] == "p":
            if toks[1] != "edge":
                raise ValueError(f"unsupported DIMACS kind {toks[1]!r}")
            n = int(toks[2])
        elif toks[0] == "e":
            edges.append((int(toks[1]) - 1, int(toks[2]) - 1))
    if n is None:
        raise ValueError("missing DIMACS problem line")
    return Graph.build(n, edges)


@dataclass(frozen=True)
class FphpInstance:
    """Bipartite constraint graph: pigeon i may use exactly the holes in
    neighbours[i], an ordered tuple of k distinct holes."""

    n_pigeons: int
    n_holes: int
    neighbours: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.neighbours) != self.n_pigeons:
            raise ValueError("wrong number of pigeon rows")
        if self.n_pigeons == 0:
            raise ValueError("need at least one pigeon")
        k = len(self.neighbours[0])
        for i, holes in enumerate(self.neighbours):
            if len(holes) != k:
                raise ValueError(f"pigeon {i} breaks left-regularity")
            if len(set(holes)) != len(holes):
                raise ValueError(f"pigeon {i} lists a hole twice")
            for j in holes:
                if not (0 <= j < self.n_holes):
                    raise ValueError(f"pigeon {i} lists hole {j} out of range")

    @classmethod
    def build(cls, neighbours: Iterable[Iterable[int]], n_holes: int | None = None) -> "FphpInstance":
        rows = tuple(tuple(r) for r in neighbours)
        if n_holes is None:
            n_holes = max((j for r in rows for j in r), default=-1) + 1
        return cls(len(rows), n_holes, rows)

    @property
    def left_degree(self) -> int:
        return len(self.neighbours[0])

    def right_degrees(self) -> List[int]:
        deg = [0] * self.n_holes
        for holes in self.neighbours:
            for j in holes:
                deg[j] += 1
        return deg

    def pigeons_of_hole(self, j: int) -> List[int]:
        return [i for i in range(self.n_pigeons) if j in self.neighbours[i]]

    def edge_label(self, i: int, j: int) -> int:
        """0-based position of hole j in pigeon i's ordered list."""
        return self.neighbours[i].index(j)


def fphp_to_text(b: FphpInstance) -> str:
    lines = [f"fphp {b.n_pigeons} {b.n_holes} {b.left_degree}"]
    for holes in b.neighbours:
        lines.append(" ".join(str(j) for j in holes))
    return "\n".join(lines) + "\n"


def fphp_from_text(text: str) -> FphpInstance:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("c")]
    head = lines[0].split()
    if head[0] != "fphp":
        raise ValueError("missing fphp header")
    n_pigeons, n_holes, k = int(head[1]), int(head[2]), int(head[3])
    rows = []
    for ln in lines[1 : 1 + n_pigeons]:
        row = tuple(int(t) for t in ln.split())
        if len(row) != k:
            raise ValueError("pigeon row does not match declared degree")
        rows.append(row)
    return FphpInstance(n_pigeons, n_holes, tuple(rows))
