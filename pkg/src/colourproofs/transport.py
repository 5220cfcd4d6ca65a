"""Explicit low-degree derivations that translate proofs between encodings.

Two bridges live here.

Roots-to-0/1: substituting y_v -> sum_j x_{v,j} w^j turns any proof in the
roots-of-unity encoding into a proof skeleton over Boolean colouring
variables.  The substituted image of each roots axiom is derived from the
0/1 colouring axioms in degree at most 2k, and multiplication steps are
re-expanded variable by variable, so a degree-d roots refutation becomes a
checked 0/1 refutation of degree at most max(2k, d).

Colouring-to-pigeonhole: substituting each colouring variable of a reduced
graph by its quadratic pigeon-pair polynomial turns colouring proofs into
pigeon-hole proofs.  The substituted images of all colouring axioms are
derived from the pigeon-hole axioms in degree at most 4, so a degree-d
colouring refutation becomes a checked pigeon-hole refutation of degree at
most 2d.

Both transports handle exponent-cap overflow in multiplication steps by
adding the derived image of the relevant cap generator (the substituted
y^k - 1 or x^2 - x), which is exactly where those images earn their keep.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .encodings import (Axiom, PolySystem, colour_var, encode_colouring01,
                        encode_fphp, fphp_var, roots_substitution)
from .errors import MissingRoot
from .fields import FieldElement, FieldSpec
from .graphs import FphpInstance, Graph
from .pcsearch import PcBuilder, PcProof, pc_check
from .polynomials import MONO_ONE, Monomial, Polynomial, grlex_key, mono_degree
from .reduction import ReductionOutput, pc_substitution_map


# -- generic helpers ------------------------------------------------------------


def quad_axiom_table(sys: PolySystem) -> Dict[Monomial, int]:
    """Indices of all axioms that are a single quadratic monomial."""
    out: Dict[Monomial, int] = {}
    for i, a in enumerate(sys.axioms):
        if len(a.poly.terms) == 1:
            mono = next(iter(a.poly.terms))
            if mono_degree(mono) == 2 and a.poly.terms[mono].is_one():
                out.setdefault(mono, i)
    return out


def _find_quad(mono: Monomial, quads: Dict[Monomial, int]) -> Optional[Tuple[Monomial, int]]:
    vars_ = [v for v, _ in mono]
    for ai in range(len(vars_)):
        for bi in range(ai + 1, len(vars_)):
            key = tuple(sorted(((vars_[ai], 1), (vars_[bi], 1))))
            idx = quads.get(key)
            if idx is not None:
                return key, idx
    return None


def derive_pair_divisible(builder: PcBuilder, target: Polynomial,
                          quads: Dict[Monomial, int]) -> int:
    """Derive a polynomial each of whose monomials contains some registered
    quadratic-monomial axiom: multiply that axiom up to the monomial and sum."""
    parts: List[Tuple[int, FieldElement]] = []
    for mono in sorted(target.terms, key=grlex_key, reverse=True):
        hit = _find_quad(mono, quads)
        assert hit is not None, f"monomial {mono} carries no quadratic axiom"
        key, idx = hit
        rest = tuple((v, e) for v, e in mono if v not in (key[0][0], key[1][0]))
        ln = builder.mul_chain(builder.initial(idx), rest)
        parts.append((ln, target.terms[mono]))
    return builder.accumulate(parts)


def derive_sum_to(builder: PcBuilder, parts: List[Tuple[int, FieldElement]],
                  remainder: Polynomial, quads: Dict[Monomial, int]) -> int:
    """Accumulate structured parts and mop up the pair-divisible remainder."""
    if not remainder.is_zero():
        parts = list(parts) + [(derive_pair_divisible(builder, remainder, quads),
                                builder.sys.field.one)]
    return builder.accumulate(parts)


def poly_times_line(builder: PcBuilder, line: int, factor: Polynomial) -> int:
    """Derive the cap-reduced product of an existing line with a polynomial,
    one monomial multiplication chain per term."""
    parts: List[Tuple[int, FieldElement]] = []
    for mono in sorted(factor.terms, key=grlex_key, reverse=True):
        ln = builder.mul_chain(line, mono)
        parts.append((ln, factor.terms[mono]))
    return builder.accumulate(parts)


# -- roots-of-unity to 0/1 ------------------------------------------------------


class RootsBridge:
    """Shared state for deriving substituted roots axioms over the 0/1 system."""

    def __init__(self, g: Graph, k: int, f: FieldSpec):
        if f.kth_root is None or f.k != k:
            raise MissingRoot(f"{f} holds no primitive {k}-th root of unity")
        self.graph = g
        self.k = k
        self.field = f
        self.sys01 = encode_colouring01(g, k, f)
        self.images = roots_substitution(g, k, f)
        self.quads = quad_axiom_table(self.sys01)
        self.vertex_axiom = {a.meta[1]: i for i, a in enumerate(self.sys01.axioms)
                             if a.tag == "vertex"}
        self.edge_axiom = {(a.meta[1], a.meta[2], a.meta[3]): i
                           for i, a in enumerate(self.sys01.axioms) if a.tag == "edge"}

    def vertex_image_target(self, v: int) -> Polynomial:
        # substituted y_v^k - 1
        return self.images[v].power(self.k) - Polynomial.one(self.field, "boolean")

    def edge_image_target(self, u: int, v: int) -> Polynomial:
        from .encodings import roots_edge_polynomial

        edge = roots_edge_polynomial(self.field, f"roots:{self.k}", u, v, self.k)
        return edge.substitute(self.images, "boolean")

    def derive_vertex_image(self, builder: PcBuilder, v: int) -> int:
        """Substituted power axiom: the vertex-sum axiom plus monomials that
        all contain two colours of the same vertex."""
        target = self.vertex_image_target(v)
        base = builder.initial(self.vertex_axiom[v])
        remainder = target - builder.poly(base)
        ln = derive_sum_to(builder, [(base, self.field.one)], remainder, self.quads)
        assert builder.poly(ln) == target
        return ln

    def derive_edge_image(self, builder: PcBuilder, u: int, v: int) -> int:
        """Substituted edge polynomial, split into a diagonal part from the
        monochromatic-edge axioms (the off-diagonal geometric sums vanish),
        two vertex-sum multiples, and a pair-divisible remainder."""
        k, f = self.k, self.field
        w = f.kth_root
        target = self.edge_image_target(u, v)
        parts: List[Tuple[int, FieldElement]] = []
        k_el = _int_in_field(f, k)
        for a in range(k):
            ln = builder.initial(self.edge_axiom[(min(u, v), max(u, v), a)])
            parts.append((ln, k_el * w**((k - 1) * a)))
        vu = builder.initial(self.vertex_axiom[u])
        for b in range(k):
            ln = builder.mul(vu, colour_var(v, b, k))
            parts.append((ln, -(w**((k - 1) * b))))
        vv = builder.initial(self.vertex_axiom[v])
        for a in range(k):
            ln = builder.mul(vv, colour_var(u, a, k))
            parts.append((ln, -(w**((k - 1) * a))))
        structured = Polynomial.zero(f, "boolean")
        for ln, c in parts:
            structured = structured + builder.poly(ln).scaled(c)
        remainder = target - structured
        ln = derive_sum_to(builder, parts, remainder, self.quads)
        assert builder.poly(ln) == target
        return ln


def _int_in_field(f: FieldSpec, n: int) -> FieldElement:
    acc = f.zero
    for _ in range(n % f.p):
        acc = acc + f.one
    return acc


def derive_substituted_roots_axioms(g: Graph, k: int, f: FieldSpec
                                    ) -> Tuple[PolySystem, List[Tuple[str, tuple, PcProof]]]:
    """Standalone checked derivations of every substituted roots axiom from
    the 0/1 colouring axioms; degree at most 2k each.

    Returns the 0/1 system and a list of (tag, key, proof) entries, one per
    vertex power axiom and one per edge polynomial.
    """
    bridge = RootsBridge(g, k, f)
    out: List[Tuple[str, tuple, PcProof]] = []
    for v in range(g.n_vertices):
        builder = PcBuilder(bridge.sys01)
        bridge.derive_vertex_image(builder, v)
        out.append(("vertex", (v,), builder.proof()))
    for u, v in g.sorted_edges():
        builder = PcBuilder(bridge.sys01)
        bridge.derive_edge_image(builder, u, v)
        out.append(("edge", (u, v), builder.proof()))
    return bridge.sys01, out


def transport_roots_refutation(proof: PcProof, roots_sys: PolySystem, g: Graph,
                               k: int) -> Tuple[PolySystem, PcProof]:
    """Turn a proof in the roots encoding into one over the 0/1 encoding.

    Linear combinations transport as they stand; a multiplication by y_v
    becomes k multiplications by the x_{v,j} plus a linear combination, with
    an extra correction through the substituted power axiom whenever the
    multiplication wrapped an exponent past k.
    """
    f = roots_sys.field
    bridge = RootsBridge(g, k, f)
    builder = PcBuilder(bridge.sys01)
    vertex_lines: Dict[int, int] = {}
    edge_lines: Dict[int, int] = {}
    line_map: Dict[int, int] = {}

    def vertex_image_line(v: int) -> int:
        if v not in vertex_lines:
            vertex_lines[v] = bridge.derive_vertex_image(builder, v)
        return vertex_lines[v]

    for t, (poly, just) in enumerate(proof.lines):
        kind = just[0]
        if kind == "initial":
            idx = just[1]
            axiom = roots_sys.axioms[idx]
            if axiom.poly.is_zero():
                line_map[t] = builder.zero()
            else:
                if idx not in edge_lines:
                    u, v = axiom.meta[1], axiom.meta[2]
                    edge_lines[idx] = bridge.derive_edge_image(builder, u, v)
                line_map[t] = edge_lines[idx]
        elif kind == "lincomb":
            _, i, j, a, b = just
            line_map[t] = builder.lincomb(line_map[i], line_map[j], a, b)
        elif kind == "mul":
            _, i, var = just
            src = proof.lines[i][0]
            la = poly_times_line(builder, line_map[i], bridge.images[var])
            high_terms = []
            for m, c in src.terms.items():
                exps = dict(m)
                if exps.get(var, 0) == k - 1:
                    rest = tuple((vv, e) for vv, e in m if vv != var)
                    high_terms.append((rest, c))
            if high_terms:
                high = Polynomial.from_terms(f, f"roots:{k}", high_terms)
                q = high.substitute(bridge.images, "boolean")
                lb = poly_times_line(builder, vertex_image_line(var), q)
                line_map[t] = builder.lincomb(la, lb, f.one, -f.one)
            else:
                line_map[t] = la
        else:
            raise ValueError(f"rule {kind!r} has no roots-side meaning")
        expected = poly.substitute(bridge.images, "boolean")
        assert builder.poly(line_map[t]) == expected, f"transport drifted at line {t}"
    return bridge.sys01, builder.proof()


# -- colouring of a reduced graph to pigeon-hole --------------------------------


class ReductionBridge:
    """Shared state for deriving substituted colouring axioms of a reduced
    graph over the pigeon-hole system."""

    def __init__(self, b: FphpInstance, out: ReductionOutput, f: FieldSpec):
        self.b = b
        self.out = out
        self.k = out.k
        self.field = f
        self.sys01 = encode_colouring01(out.graph, out.k, f)
        self.fphp = encode_fphp(b, f)
        self.images = pc_substitution_map(b, out, f)
        self.quads = quad_axiom_table(self.fphp)
        self.pigeon_axiom = {a.meta[1]: i for i, a in enumerate(self.fphp.axioms)
                             if a.tag == "pigeon"}
        self.uniq_axiom = {(a.meta[1], a.meta[2], a.meta[3]): i
                           for i, a in enumerate(self.fphp.axioms) if a.tag == "uniqueness"}
        self.coll_axiom = {(a.meta[1], a.meta[2], a.meta[3]): i
                           for i, a in enumerate(self.fphp.axioms) if a.tag == "collision"}
        self.gadget_of = out.gadget_of_vertex()
        self.pigeon_of_vertex = {vid: i for i, vid in out.pigeon_vertex.items()}

    def image_of_axiom(self, axiom: Axiom) -> Polynomial:
        return axiom.poly.substitute(self.images, "boolean")

    def derive_gadget_vertex_image(self, builder: PcBuilder, gadget, target: Polynomial) -> int:
        """The substituted vertex-sum axiom of a gadget-internal vertex: all
        pigeon colour pairs minus the excluded one minus 1, derived from the
        two pigeon axioms and the collision axiom in degree 2."""
        i, ip = gadget.pigeons
        f = self.field
        parts: List[Tuple[int, FieldElement]] = []
        lip = builder.initial(self.pigeon_axiom[ip])
        for bb in range(self.k):
            parts.append((builder.mul(lip, fphp_var(i, bb, self.k)), f.one))
        parts.append((builder.initial(self.pigeon_axiom[i]), f.one))
        parts.append((builder.initial(self.coll_axiom[(i, ip, gadget.hole)]), -f.one))
        ln = builder.accumulate(parts)
        assert builder.poly(ln) == target, "gadget vertex image mismatch"
        return ln

    def derive_axiom_image(self, builder: PcBuilder, idx: int) -> int:
        """Dispatch on the colouring axiom's role in the reduced graph."""
        axiom = self.sys01.axioms[idx]
        target = self.image_of_axiom(axiom)
        tag = axiom.tag
        if tag == "vertex":
            v = axiom.meta[1]
            if v in self.pigeon_of_vertex:
                i = self.pigeon_of_vertex[v]
                ln = builder.initial(self.pigeon_axiom[i])
                assert builder.poly(ln) == target
                return ln
            if v in self.gadget_of:
                return self.derive_gadget_vertex_image(builder, self.gadget_of[v], target)
            assert target.is_zero(), "chain vertex image should vanish"
            return builder.zero()
        if tag == "uniqueness":
            v = axiom.meta[1]
            if v in self.pigeon_of_vertex:
                i = self.pigeon_of_vertex[v]
                ln = builder.initial(self.uniq_axiom[(i, axiom.meta[2], axiom.meta[3])])
                assert builder.poly(ln) == target
                return ln
        if tag == "boolean":
            assert target.is_zero()
            return builder.zero()
        # remaining uniqueness and all edge axioms: zero or pair-divisible
        if target.is_zero():
            return builder.zero()
        ln = derive_pair_divisible(builder, target, self.quads)
        assert builder.poly(ln) == target
        return ln


def derive_substituted_colouring_axioms(b: FphpInstance, out: ReductionOutput,
                                        f: FieldSpec
                                        ) -> Tuple["ReductionBridge", List[Tuple[int, PcProof]]]:
    """Standalone checked derivations, from the pigeon-hole axioms, of the
    substituted image of every colouring axiom of the reduced graph; degree
    at most 4 each."""
    bridge = ReductionBridge(b, out, f)
    proofs: List[Tuple[int, PcProof]] = []
    for idx in range(len(bridge.sys01.axioms)):
        builder = PcBuilder(bridge.fphp)
        bridge.derive_axiom_image(builder, idx)
        proofs.append((idx, builder.proof()))
    return bridge, proofs


def compose_colouring_to_fphp(proof: PcProof, b: FphpInstance, out: ReductionOutput,
                              f: FieldSpec) -> Tuple["ReductionBridge", PcProof]:
    """Transport a proof over the reduced graph's colouring system to one over
    the pigeon-hole system, via the quadratic substitution.

    Every line maps to its substituted image (degree at most doubled);
    multiplications by a colouring variable expand through the variable's
    quadratic image, with a correction through the substituted Boolean axiom
    when the multiplication collapsed a square.
    """
    bridge = ReductionBridge(b, out, f)
    builder = PcBuilder(bridge.fphp)
    axiom_lines: Dict[int, int] = {}
    boolean_lines: Dict[int, int] = {}
    line_map: Dict[int, int] = {}

    def axiom_image_line(idx: int) -> int:
        if idx not in axiom_lines:
            axiom_lines[idx] = bridge.derive_axiom_image(builder, idx)
        return axiom_lines[idx]

    def boolean_image_line(var: int) -> int:
        # image of x^2 - x, i.e. ML(S^2) - S; zero unless S is quadratic
        if var not in boolean_lines:
            s = bridge.images[var]
            target = s * s - s
            if target.is_zero():
                boolean_lines[var] = builder.zero()
            else:
                ln = derive_pair_divisible(builder, target, bridge.quads)
                assert builder.poly(ln) == target
                boolean_lines[var] = ln
        return boolean_lines[var]

    for t, (poly, just) in enumerate(proof.lines):
        kind = just[0]
        if kind == "initial":
            line_map[t] = axiom_image_line(just[1])
        elif kind == "boolean":
            line_map[t] = builder.zero()
        elif kind == "lincomb":
            _, i, j, a, b_ = just
            line_map[t] = builder.lincomb(line_map[i], line_map[j], a, b_)
        elif kind == "mul":
            _, i, var = just
            src = proof.lines[i][0]
            la = poly_times_line(builder, line_map[i], bridge.images[var])
            high_terms = []
            for m, c in src.terms.items():
                if any(v == var for v, _ in m):
                    rest = tuple((vv, e) for vv, e in m if vv != var)
                    high_terms.append((rest, c))
            if high_terms:
                high = Polynomial.from_terms(f, "boolean", high_terms)
                q = high.substitute(bridge.images, "boolean")
                if q.is_zero():
                    line_map[t] = la
                else:
                    lb = poly_times_line(builder, boolean_image_line(var), q)
                    line_map[t] = builder.lincomb(la, lb, f.one, -f.one)
            else:
                line_map[t] = la
        else:
            raise ValueError(f"unknown rule {kind!r}")
        expected = poly.substitute(bridge.images, "boolean")
        assert builder.poly(line_map[t]) == expected, f"transport drifted at line {t}"
    return bridge, builder.proof()
