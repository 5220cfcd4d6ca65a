"""Input systems: colouring polynomials (0/1 and roots-of-unity forms),
colouring inequalities, and constrained pigeon-hole polynomials.

Variable numbering is row-major throughout: the 0/1 colouring variable for
vertex v and colour j (colours 0..k-1 internally) has id v*k + j, and the
pigeon-hole variable for pigeon i's c-th edge has id i*k + c.  Printers map
colours back to the external 1..k convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import MissingRoot
from .fields import FieldElement, FieldSpec
from .graphs import FphpInstance, Graph
from .polynomials import MONO_ONE, Polynomial


@dataclass
class Axiom:
    """One generator of a polynomial system.

    ``poly`` is the cap-reduced working form; ``display`` keeps the
    pre-reduction shape (they differ only for cap generators such as
    x^2 - x and y^k - 1, whose working form is zero because the cap
    already enforces them).  ``nominal_degree`` is the pre-reduction degree
    used for degree accounting.
    """

    tag: str
    poly: Polynomial
    nominal_degree: int
    display: Optional[Polynomial] = None
    meta: tuple = ()

    @property
    def pretty(self) -> Polynomial:
        return self.display if self.display is not None else self.poly


@dataclass
class PolySystem:
    field: FieldSpec
    cap: Optional[str]
    axioms: List[Axiom]
    n_vars: int
    var_names: Dict[int, str]

    def polynomials(self) -> List[Polynomial]:
        return [a.poly for a in self.axioms]

    def max_axiom_degree(self) -> int:
        return max(a.nominal_degree for a in self.axioms)

    def search_floor_degree(self) -> int:
        """Smallest degree worth searching: the max nominal degree over axioms
        that are not cap generators (those reduce to zero and need no
        multiplier or proof line)."""
        return max((a.nominal_degree for a in self.axioms if not a.poly.is_zero()), default=0)

    def axioms_tagged(self, *tags: str) -> List[Tuple[int, Axiom]]:
        return [(i, a) for i, a in enumerate(self.axioms) if a.tag in tags]

    def variables(self) -> List[int]:
        """Variables occurring in effective axioms; isolated variables cannot
        help a bounded-degree search and are skipped."""
        seen = set()
        for a in self.axioms:
            seen.update(a.poly.variables())
        return sorted(seen)


# -- CP systems ---------------------------------------------------------------


class CpLine:
    """Integer linear inequality sum(coeffs[v] * x_v) >= bound.

    ``<=`` and ``=`` readings are provided by callers negating coefficients;
    only the >= sense is stored.
    """

    __slots__ = ("coeffs", "bound")

    def __init__(self, coeffs: Dict[int, int], bound: int):
        self.coeffs = {v: c for v, c in coeffs.items() if c != 0}
        self.bound = bound

    @classmethod
    def at_most(cls, coeffs: Dict[int, int], bound: int) -> "CpLine":
        return cls({v: -c for v, c in coeffs.items()}, -bound)

    def __eq__(self, other):
        return isinstance(other, CpLine) and self.coeffs == other.coeffs and self.bound == other.bound

    def __hash__(self):
        return hash((frozenset(self.coeffs.items()), self.bound))

    def key(self):
        return (tuple(sorted(self.coeffs.items())), self.bound)

    def satisfied_by(self, assignment: Dict[int, int]) -> bool:
        return sum(c * assignment.get(v, 0) for v, c in self.coeffs.items()) >= self.bound

    def __repr__(self):
        return cp_line_to_text(self)


def cp_line_to_text(line: CpLine) -> str:
    if not line.coeffs:
        return f"0 >= {line.bound}"
    parts = []
    for v in sorted(line.coeffs):
        c = line.coeffs[v]
        parts.append(f"{c}*x_{v}" if c != 1 else f"x_{v}")
    return " + ".join(parts) + f" >= {line.bound}"


def cp_line_from_text(text: str) -> CpLine:
    lhs, bound = text.split(">=")
    coeffs: Dict[int, int] = {}
    lhs = lhs.strip()
    if lhs != "0":
        for part in lhs.split(" + "):
            part = part.strip()
            if "*" in part:
                c, var = part.split("*")
                coeffs[int(var[2:])] = int(c)
            else:
                coeffs[int(part[2:])] = 1
    return CpLine(coeffs, int(bound.strip()))


@dataclass
class CpSystem:
    lines: List[Tuple[str, CpLine]]  # (tag, inequality)
    n_vars: int
    var_names: Dict[int, str]

    def inequalities(self) -> List[CpLine]:
        return [ln for _, ln in self.lines]

    def index_by_key(self) -> Dict[tuple, int]:
        return {ln.key(): i for i, (_, ln) in enumerate(self.lines)}


def cp_system_to_text(sys: CpSystem) -> str:
    lines = [f"cpsys {sys.n_vars} {len(sys.lines)}"]
    for tag, ln in sys.lines:
        lines.append(f"{tag}: {cp_line_to_text(ln)}")
    return "\n".join(lines) + "\n"


def cp_system_from_text(text: str) -> CpSystem:
    raw = [ln for ln in text.splitlines() if ln.strip()]
    head = raw[0].split()
    n_vars = int(head[1])
    out = []
    for ln in raw[1:]:
        tag, body = ln.split(":", 1)
        out.append((tag.strip(), cp_line_from_text(body.strip())))
    return CpSystem(out, n_vars, {})


def cp_system_to_opb(sys: CpSystem) -> str:
    """Pseudo-Boolean OPB export (variables x1..xn, 1-indexed)."""
    lines = [f"* #variable= {sys.n_vars} #constraint= {len(sys.lines)}"]
    for _, ln in sys.lines:
        parts = []
        for v in sorted(ln.coeffs):
            c = ln.coeffs[v]
            parts.append(f"{'+' if c >= 0 else ''}{c} x{v + 1}")
        lines.append(" ".join(parts) + f" >= {ln.bound} ;")
    return "\n".join(lines) + "\n"


# -- variable naming -----------------------------------------------------------


def colour_var(v: int, j: int, k: int) -> int:
    return v * k + j


def colour_var_names(n_vertices: int, k: int) -> Dict[int, str]:
    return {v * k + j: f"x[{v},{j + 1}]" for v in range(n_vertices) for j in range(k)}


def fphp_var(i: int, c: int, k: int) -> int:
    return i * k + c


def fphp_var_names(b: FphpInstance) -> Dict[int, str]:
    k = b.left_degree
    return {
        i * k + c: f"p[{i},{b.neighbours[i][c]}]"
        for i in range(b.n_pigeons)
        for c in range(k)
    }


# -- encoders ------------------------------------------------------------------


def _boolean_axioms(field: FieldSpec, n_vars: int) -> List[Axiom]:
    out = []
    for v in range(n_vars):
        display = Polynomial.from_terms(field, None, [(((v, 2),), field.one), (((v, 1),), -field.one)])
        out.append(Axiom("boolean", Polynomial.zero(field, "boolean"), 2, display, meta=("var", v)))
    return out


def encode_colouring01(g: Graph, k: int, f: FieldSpec) -> PolySystem:
    """0/1 colouring polynomials: one vertex sum, pairwise colour exclusion,
    and monochromatic-edge exclusion, plus Boolean axioms per variable."""
    if k < 1:
        raise ValueError("k must be >= 1")
    cap = "boolean"
    one = f.one
    axioms: List[Axiom] = []
    for v in range(g.n_vertices):
        terms = [((( colour_var(v, j, k), 1),), one) for j in range(k)]
        terms.append((MONO_ONE, -one))
        axioms.append(Axiom("vertex", Polynomial.from_terms(f, cap, terms), 1, meta=("vertex", v)))
    for v in range(g.n_vertices):
        for j in range(k):
            for jp in range(j + 1, k):
                mono = ((colour_var(v, j, k), 1), (colour_var(v, jp, k), 1))
                axioms.append(Axiom("uniqueness", Polynomial.from_terms(f, cap, [(mono, one)]), 2,
                                    meta=("vertex", v, j, jp)))
    for u, v in g.sorted_edges():
        for j in range(k):
            mono = tuple(sorted(((colour_var(u, j, k), 1), (colour_var(v, j, k), 1))))
            axioms.append(Axiom("edge", Polynomial.from_terms(f, cap, [(mono, one)]), 2,
                                meta=("edge", u, v, j)))
    n_vars = g.n_vertices * k
    axioms.extend(_boolean_axioms(f, n_vars))
    return PolySystem(f, cap, axioms, n_vars, colour_var_names(g.n_vertices, k))


def roots_edge_polynomial(f: FieldSpec, cap: str, yu: int, yv: int, k: int) -> Polynomial:
    terms = []
    for j in range(k):
        mono = []
        if j:
            mono.append((yu, j))
        if k - 1 - j:
            mono.append((yv, k - 1 - j))
        terms.append((tuple(sorted(mono)), f.one))
    return Polynomial.from_terms(f, cap, terms)


def encode_colouring_roots(g: Graph, k: int, f: FieldSpec) -> PolySystem:
    """Roots-of-unity colouring: one variable per vertex ranging over the
    k-th roots of unity, a power axiom per vertex and a geometric-sum
    polynomial per edge."""
    if f.kth_root is None or f.k != k:
        raise MissingRoot(f"{f} holds no primitive {k}-th root of unity")
    cap = f"roots:{k}"
    axioms: List[Axiom] = []
    for v in range(g.n_vertices):
        display = Polynomial.from_terms(f, None, [(((v, k),), f.one), (MONO_ONE, -f.one)])
        axioms.append(Axiom("vertex", Polynomial.zero(f, cap), k, display, meta=("vertex", v)))
    for u, v in g.sorted_edges():
        axioms.append(Axiom("edge", roots_edge_polynomial(f, cap, u, v, k), k - 1, meta=("edge", u, v)))
    names = {v: f"y[{v}]" for v in range(g.n_vertices)}
    return PolySystem(f, cap, axioms, g.n_vertices, names)


def encode_colouring_cp(g: Graph, k: int) -> CpSystem:
    """Colouring as integer inequalities over 0/1 variables."""
    if k < 1:
        raise ValueError("k must be >= 1")
    lines: List[Tuple[str, CpLine]] = []
    for v in range(g.n_vertices):
        lines.append(("vertex", CpLine({colour_var(v, j, k): 1 for j in range(k)}, 1)))
    for v in range(g.n_vertices):
        for j in range(k):
            for jp in range(j + 1, k):
                lines.append(("uniqueness", CpLine.at_most(
                    {colour_var(v, j, k): 1, colour_var(v, jp, k): 1}, 1)))
    for u, v in g.sorted_edges():
        for j in range(k):
            lines.append(("edge", CpLine.at_most(
                {colour_var(u, j, k): 1, colour_var(v, j, k): 1}, 1)))
    return CpSystem(lines, g.n_vertices * k, colour_var_names(g.n_vertices, k))


def encode_fphp(b: FphpInstance, f: FieldSpec) -> PolySystem:
    """Pigeon-hole polynomials: each pigeon takes exactly one of its holes
    and no hole takes two pigeons."""
    cap = "boolean"
    k = b.left_degree
    one = f.one
    axioms: List[Axiom] = []
    for i in range(b.n_pigeons):
        terms = [(((fphp_var(i, c, k), 1),), one) for c in range(k)]
        terms.append((MONO_ONE, -one))
        axioms.append(Axiom("pigeon", Polynomial.from_terms(f, cap, terms), 1, meta=("pigeon", i)))
    for i in range(b.n_pigeons):
        for c in range(k):
            for cp in range(c + 1, k):
                mono = ((fphp_var(i, c, k), 1), (fphp_var(i, cp, k), 1))
                axioms.append(Axiom("uniqueness", Polynomial.from_terms(f, cap, [(mono, one)]), 2,
                                    meta=("pigeon", i, c, cp)))
    for j in range(b.n_holes):
        pigeons = b.pigeons_of_hole(j)
        for a in range(len(pigeons)):
            for bb in range(a + 1, len(pigeons)):
                i, ip = pigeons[a], pigeons[bb]
                mono = tuple(sorted(((fphp_var(i, b.edge_label(i, j), k), 1),
                                     (fphp_var(ip, b.edge_label(ip, j), k), 1))))
                axioms.append(Axiom("collision", Polynomial.from_terms(f, cap, [(mono, one)]), 2,
                                    meta=("collision", i, ip, j)))
    n_vars = b.n_pigeons * k
    axioms.extend(_boolean_axioms(f, n_vars))
    return PolySystem(f, cap, axioms, n_vars, fphp_var_names(b))


def encode_fphp_cp(b: FphpInstance) -> CpSystem:
    """Pigeon-hole inequalities used by the counting refutation."""
    k = b.left_degree
    lines: List[Tuple[str, CpLine]] = []
    for i in range(b.n_pigeons):
        lines.append(("pigeon", CpLine({fphp_var(i, c, k): 1 for c in range(k)}, 1)))
    for j in range(b.n_holes):
        pigeons = b.pigeons_of_hole(j)
        for a in range(len(pigeons)):
            for bb in range(a + 1, len(pigeons)):
                i, ip = pigeons[a], pigeons[bb]
                lines.append(("collision", CpLine.at_most(
                    {fphp_var(i, b.edge_label(i, j), k): 1,
                     fphp_var(ip, b.edge_label(ip, j), k): 1}, 1)))
    return CpSystem(lines, b.n_pigeons * k, fphp_var_names(b))


def roots_substitution(g: Graph, k: int, f: FieldSpec) -> Dict[int, Polynomial]:
    """Bridge between the two colouring encodings: the roots variable of each
    vertex maps to sum_j x_{v,j} w^j over fresh Boolean variables."""
    if f.kth_root is None or f.k != k:
        raise MissingRoot(f"{f} holds no primitive {k}-th root of unity")
    w = f.kth_root
    images: Dict[int, Polynomial] = {}
    for v in range(g.n_vertices):
        terms = [(((colour_var(v, j, k), 1),), w**j) for j in range(k)]
        images[v] = Polynomial.from_terms(f, "boolean", terms)
    return images


# -- system text I/O ----------------------------------------------------------


def poly_system_to_text(sys: PolySystem) -> str:
    from .polynomials import cap_header, poly_to_text

    lines = [sys.field.header(), cap_header(sys.cap), f"vars {sys.n_vars}"]
    for a in sys.axioms:
        lines.append(f"{a.tag}: {poly_to_text(a.pretty)}")
    return "\n".join(lines) + "\n"


def poly_system_from_text(text: str) -> PolySystem:
    from .fields import attach_kth_root, field_spec_from_header
    from .polynomials import cap_from_header, poly_from_text

    raw = [ln for ln in text.splitlines() if ln.strip()]
    fld = field_spec_from_header(raw[0])
    cap = cap_from_header(raw[1])
    if cap is not None and cap.startswith("roots:"):
        fld = attach_kth_root(fld, int(cap.split(":")[1]))
    n_vars = int(raw[2].split()[1])
    axioms = []
    for ln in raw[3:]:
        tag, body = ln.split(":", 1)
        tag = tag.strip()
        display = poly_from_text(body.strip(), fld, None)
        reduced = display.with_cap(cap)
        nominal = max(display.degree, 0)
        if tag in ("boolean",) or (tag == "vertex" and cap and cap.startswith("roots")):
            axioms.append(Axiom(tag, Polynomial.zero(fld, cap), nominal, display))
        else:
            axioms.append(Axiom(tag, reduced, nominal))
    return PolySystem(fld, cap, axioms, n_vars, {})
