"""Polynomial calculus: proof objects, checker, and the bounded-degree
saturation prover.

A proof is a sequence of (polynomial, justification) lines where each line is
a Boolean axiom, an initial axiom of the system, a linear combination of two
earlier lines, or an earlier line multiplied by one variable.  Lines are
stored cap-reduced; the cap plays the role of the generator axioms x^2 - x
(Boolean) or y^k - 1 (roots), so those lines carry the zero polynomial and
multiplication multilinearises silently.  Degree accounting is pre-reduction:
a multiplication line costs one more than its source, and initial axioms
count their nominal degree.

The prover computes the least vector space containing all axioms of degree at
most d and closed under multiplication by a variable (cap-reduced, truncated
to degree d), keeping the basis in row echelon form under graded-lex order.
Membership of the constant 1 decides refutability, and the elimination trace
rebuilds an explicit checkable proof.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .encodings import PolySystem
from .errors import BudgetExceeded, DegreeTooSmall, FieldMismatch
from .fields import FieldElement
from .nullsatz import NssCertificate, monomials_up_to
from .polynomials import (MONO_ONE, Monomial, Polynomial, grlex_key,
                          mono_degree, mono_mul, cap_reduce_mono)

# justifications: ("boolean", var) | ("initial", idx) |
#                 ("lincomb", i, j, a, b) | ("mul", i, var)


@dataclass
class PcProof:
    lines: List[Tuple[Polynomial, tuple]]

    def __len__(self):
        return len(self.lines)

    def final(self) -> Polynomial:
        return self.lines[-1][0]

    def is_refutation(self) -> bool:
        if not self.lines:
            return False
        p = self.final()
        return p == Polynomial.one(p.field, p.cap)


def line_degree(poly: Polynomial, just: tuple, lines, sys: PolySystem) -> int:
    kind = just[0]
    if kind == "boolean":
        return 2
    if kind == "initial":
        return sys.axioms[just[1]].nominal_degree
    if kind == "mul":
        src = lines[just[1]][0]
        return max(src.degree + 1, 0)
    return max(poly.degree, 0)


def pc_check(proof: PcProof, sys: PolySystem) -> Tuple[bool, int]:
    """Replays every justification with exact arithmetic and cap reduction.

    Returns (valid, degree); on the first mismatch returns (False, offending
    line index).
    """
    degree = 0
    for t, (poly, just) in enumerate(proof.lines):
        if poly.field != sys.field or poly.cap != sys.cap:
            return False, t
        kind = just[0]
        if kind == "boolean":
            expected = Polynomial.zero(sys.field, sys.cap)
            if sys.cap != "boolean":
                return False, t
        elif kind == "initial":
            idx = just[1]
            if not (0 <= idx < len(sys.axioms)):
                return False, t
            expected = sys.axioms[idx].poly
        elif kind == "lincomb":
            _, i, j, a, b = just
            if not (0 <= i < t and 0 <= j < t):
                return False, t
            expected = proof.lines[i][0].scaled(a) + proof.lines[j][0].scaled(b)
        elif kind == "mul":
            _, i, var = just
            if not 0 <= i < t:
                return False, t
            expected = proof.lines[i][0].mul_variable(var)
        else:
            return False, t
        if expected != poly:
            return False, t
        degree = max(degree, line_degree(poly, just, proof.lines, sys))
    return True, degree


class PcBuilder:
    """Append-only proof construction with replay-exact line polynomials."""

    def __init__(self, sys: PolySystem):
        self.sys = sys
        self.lines: List[Tuple[Polynomial, tuple]] = []
        self._zero_line: Optional[int] = None

    def poly(self, i: int) -> Polynomial:
        return self.lines[i][0]

    def _push(self, poly: Polynomial, just: tuple) -> int:
        self.lines.append((poly, just))
        return len(self.lines) - 1

    def initial(self, idx: int) -> int:
        return self._push(self.sys.axioms[idx].poly, ("initial", idx))

    def boolean(self, var: int) -> int:
        return self._push(Polynomial.zero(self.sys.field, self.sys.cap), ("boolean", var))

    def lincomb(self, i: int, j: int, a, b) -> int:
        a = self.sys.field.element(a)
        b = self.sys.field.element(b)
        poly = self.poly(i).scaled(a) + self.poly(j).scaled(b)
        return self._push(poly, ("lincomb", i, j, a, b))

    def mul(self, i: int, var: int) -> int:
        return self._push(self.poly(i).mul_variable(var), ("mul", i, var))

    def scale(self, i: int, c) -> int:
        return self.lincomb(i, i, c, self.sys.field.zero)

    def zero(self) -> int:
        if self._zero_line is None:
            if not self.lines:
                self.initial(0)
            self._zero_line = self.lincomb(0, 0, self.sys.field.one, -self.sys.field.one)
        return self._zero_line

    def mul_chain(self, i: int, mono: Monomial) -> int:
        for var, exp in mono:
            for _ in range(exp):
                i = self.mul(i, var)
        return i

    def accumulate(self, parts: Sequence[Tuple[int, FieldElement]]) -> int:
        """Linear combination of many existing lines; empty sum is the zero line."""
        if not parts:
            return self.zero()
        one = self.sys.field.one
        acc, c0 = parts[0]
        if not c0.is_one():
            acc = self.scale(acc, c0)
        for ln, c in parts[1:]:
            acc = self.lincomb(acc, ln, one, c)
        return acc

    def proof(self) -> PcProof:
        return PcProof(list(self.lines))

    def inline(self, sub: PcProof, axiom_map=None) -> int:
        """Append another proof over the same system; returns the index of its
        final line.  axiom_map rewrites the subproof's initial-axiom indices."""
        offset = len(self.lines)
        for poly, just in sub.lines:
            kind = just[0]
            if kind == "initial":
                idx = axiom_map(just[1]) if axiom_map else just[1]
                self._push(self.sys.axioms[idx].poly, ("initial", idx))
            elif kind == "boolean":
                self._push(poly, just)
            elif kind == "lincomb":
                _, i, j, a, b = just
                self.lincomb(i + offset, j + offset, a, b)
            elif kind == "mul":
                _, i, var = just
                self.mul(i + offset, var)
        return len(self.lines) - 1


# -- saturation prover ---------------------------------------------------------


class _PrimeSpace:
    """Row-echelon vector space over GF(p), dense over a fixed monomial
    universe sorted descending in graded-lex order (so the leading entry of a
    row is its first nonzero column and column 0 has maximal degree)."""

    def __init__(self, p: int, universe: List[Monomial]):
        self.p = p
        self.universe = universe
        self.col_of = {m: i for i, m in enumerate(universe)}
        self.col_degree = np.array([mono_degree(m) for m in universe], dtype=np.int32)
        self.packed = p == 2
        self.n_cols = len(universe)
        if self.packed:
            self.words = (self.n_cols + 63) // 64
            self._col_word = np.arange(self.n_cols) >> 6
            self._col_bit = (np.arange(self.n_cols) & 63).astype(np.uint64)
        self.dtype = np.int16 if p < 181 else np.int64
        self.rows: List[np.ndarray] = []
        self.pivots: Dict[int, int] = {}
        self.trace: List[tuple] = []  # (prov, [(row, coeff)], scale)

    def vec_of_poly(self, poly: Polynomial) -> np.ndarray:
        if self.packed:
            v = np.zeros(self.words, dtype=np.uint64)
            for m, c in poly.terms.items():
                col = self.col_of[m]
                v[col >> 6] ^= np.uint64(1 << (col & 63))
            return v
        v = np.zeros(self.n_cols, dtype=self.dtype)
        for m, c in poly.terms.items():
            v[self.col_of[m]] = c.coeffs[0]
        return v

    def poly_of_vec(self, vec: np.ndarray, field, cap) -> Polynomial:
        terms = []
        if self.packed:
            for col in self._nonzero_cols(vec):
                terms.append((self.universe[col], field.one))
        else:
            for col in np.nonzero(vec)[0]:
                terms.append((self.universe[int(col)], field.element(int(vec[col]))))
        return Polynomial.from_terms(field, cap, terms)

    def _nonzero_cols(self, vec: np.ndarray) -> List[int]:
        out = []
        for w in np.nonzero(vec)[0]:
            word = int(vec[w])
            base = int(w) << 6
            while word:
                low = word & -word
                out.append(base + low.bit_length() - 1)
                word ^= low
        return out

    def leading(self, vec: np.ndarray) -> Optional[int]:
        if self.packed:
            nz = np.nonzero(vec)[0]
            if not len(nz):
                return None
            w = int(nz[0])
            word = int(vec[w])
            return (w << 6) + ((word & -word).bit_length() - 1)
        nz = np.nonzero(vec)[0]
        if not len(nz):
            return None
        return int(nz[0])

    def coeff_at(self, vec, col) -> int:
        if self.packed:
            return (int(vec[col >> 6]) >> (col & 63)) & 1
        return int(vec[col])

    def insert(self, vec: np.ndarray, prov: tuple) -> Optional[int]:
        reds: List[Tuple[int, int]] = []
        while True:
            lead = self.leading(vec)
            if lead is None:
                return None
            pr = self.pivots.get(lead)
            if pr is None:
                break
            c = self.coeff_at(vec, lead)
            if self.packed:
                vec = vec ^ self.rows[pr]
            else:
                vec = (vec - c * self.rows[pr]) % self.p
            reds.append((pr, c))
        c = self.coeff_at(vec, lead)
        scale = 1
        if c != 1:
            scale = pow(c, self.p - 2, self.p)
            vec = (vec * scale) % self.p
        rid = len(self.rows)
        self.rows.append(vec)
        self.trace.append((prov, reds, scale))
        self.pivots[lead] = rid
        return rid

    def row_degree(self, rid: int) -> int:
        lead = self.leading(self.rows[rid])
        return int(self.col_degree[lead])

    def build_mul_maps(self, variables, cap) -> Dict[int, np.ndarray]:
        maps = {}
        for var in variables:
            mp = np.full(self.n_cols, -1, dtype=np.int64)
            for col, m in enumerate(self.universe):
                target = cap_reduce_mono(mono_mul(m, ((var, 1),)), cap)
                t = self.col_of.get(target)
                if t is not None:
                    mp[col] = t
            maps[var] = mp
        return maps

    def multiply(self, rid: int, mp: np.ndarray) -> np.ndarray:
        row = self.rows[rid]
        if self.packed:
            bits = ((row[self._col_word] >> self._col_bit) & np.uint64(1)).astype(np.uint8)
            src = np.nonzero(bits)[0]
            tgt = mp[src]
            assert (tgt >= 0).all(), "degree-bounded product left the universe"
            acc = np.zeros(self.n_cols, dtype=np.uint8)
            np.bitwise_xor.at(acc, tgt, 1)
            nz = np.nonzero(acc)[0]
            out = np.zeros(self.words, dtype=np.uint64)
            np.bitwise_or.at(out, nz >> 6, np.uint64(1) << (nz & 63).astype(np.uint64))
            return out
        src = np.nonzero(row)[0]
        tgt = mp[src]
        assert (tgt >= 0).all(), "degree-bounded product left the universe"
        out = np.zeros(self.n_cols, dtype=self.dtype)
        np.add.at(out, tgt, row[src])
        return out % self.p


class _GenericSpace:
    """Dict-backed variant of _PrimeSpace for extension fields."""

    def __init__(self, field, universe: List[Monomial]):
        self.field = field
        self.universe = universe
        self.order = {m: i for i, m in enumerate(universe)}
        self.rows: List[Dict[Monomial, FieldElement]] = []
        self.pivots: Dict[Monomial, int] = {}
        self.trace: List[tuple] = []

    def vec_of_poly(self, poly: Polynomial):
        return dict(poly.terms)

    def poly_of_vec(self, vec, field, cap) -> Polynomial:
        return Polynomial.from_terms(field, cap, vec.items())

    def leading(self, vec) -> Optional[Monomial]:
        if not vec:
            return None
        return min(vec, key=lambda m: self.order[m])

    def insert(self, vec, prov) -> Optional[int]:
        vec = dict(vec)
        reds = []
        while True:
            lead = self.leading(vec)
            if lead is None:
                return None
            pr = self.pivots.get(lead)
            if pr is None:
                break
            c = vec[lead]
            for m, v in self.rows[pr].items():
                nv = vec.get(m, self.field.zero) - c * v
                if nv.is_zero():
                    vec.pop(m, None)
                else:
                    vec[m] = nv
            reds.append((pr, c))
        c = vec[lead]
        scale = self.field.one
        if not c.is_one():
            scale = c.inverse()
            vec = {m: v * scale for m, v in vec.items()}
        rid = len(self.rows)
        self.rows.append(vec)
        self.trace.append((prov, reds, scale))
        self.pivots[lead] = rid
        return rid

    def row_degree(self, rid: int) -> int:
        return max(mono_degree(m) for m in self.rows[rid])

    def multiply(self, rid: int, var: int, cap):
        out: Dict[Monomial, FieldElement] = {}
        for m, c in self.rows[rid].items():
            mm = cap_reduce_mono(mono_mul(m, ((var, 1),)), cap)
            if mm in out:
                s = out[mm] + c
                if s.is_zero():
                    del out[mm]
                else:
                    out[mm] = s
            else:
                out[mm] = c
        return out


def _saturate(sys: PolySystem, d: int, node_budget: int):
    """Shared saturation loop; returns (space, refuting_row_or_None)."""
    universe = sorted(monomials_up_to(sys.variables(), d, sys.cap), key=grlex_key, reverse=True)
    prime = sys.field.m == 1
    space = _PrimeSpace(sys.field.p, universe) if prime else _GenericSpace(sys.field, universe)
    if prime:
        mul_maps = space.build_mul_maps(sys.variables(), sys.cap)
    queue = deque()
    for i, axiom in enumerate(sys.axioms):
        if axiom.poly.is_zero():
            continue
        if axiom.poly.degree > d:
            raise DegreeTooSmall(f"axiom {i} has degree {axiom.poly.degree} > {d}")
        rid = space.insert(space.vec_of_poly(axiom.poly), ("axiom", i))
        if rid is not None:
            queue.append(rid)
    const_key = 0 if prime else MONO_ONE
    # column of the constant monomial: last in descending graded-lex order
    if prime:
        const_key = space.col_of.get(MONO_ONE)
    steps = 0
    while queue:
        rid = queue.popleft()
        if space.row_degree(rid) > d - 1:
            continue
        for var in sys.variables():
            steps += 1
            if steps > node_budget:
                raise BudgetExceeded(f"saturation passed {node_budget} products")
            vec = space.multiply(rid, mul_maps[var]) if prime else space.multiply(rid, var, sys.cap)
            nid = space.insert(vec, ("mul", rid, var))
            if nid is not None:
                queue.append(nid)
                if space.pivots.get(const_key) == nid:
                    return space, nid
        if space.pivots.get(const_key) is not None:
            return space, space.pivots[const_key]
    refuter = space.pivots.get(const_key)
    return space, refuter


def _witness_from_trace(space, sys: PolySystem, target_row: int) -> PcProof:
    """Rebuild an explicit proof of the target row from the elimination trace."""
    needed = set()
    stack = [target_row]
    while stack:
        r = stack.pop()
        if r in needed:
            continue
        needed.add(r)
        prov, reds, _ = space.trace[r]
        if prov[0] == "mul":
            stack.append(prov[1])
        stack.extend(pr for pr, _ in reds)
    builder = PcBuilder(sys)
    line_of: Dict[int, int] = {}
    one = sys.field.one
    for r in sorted(needed):
        prov, reds, scale = space.trace[r]
        if prov[0] == "axiom":
            cur = builder.initial(prov[1])
        else:
            cur = builder.mul(line_of[prov[1]], prov[2])
        for pr, c in reds:
            coeff = c if isinstance(c, FieldElement) else sys.field.element(c)
            cur = builder.lincomb(cur, line_of[pr], one, -coeff)
        s = scale if isinstance(scale, FieldElement) else sys.field.element(scale)
        if not s.is_one():
            cur = builder.scale(cur, s)
        line_of[r] = cur
    final = builder.poly(line_of[target_row])
    row_poly = space.poly_of_vec(space.rows[target_row], sys.field, sys.cap)
    assert final == row_poly, "trace replay drifted from the stored row"
    return builder.proof()


def pc_refutable_at_degree(sys: PolySystem, d: int, want_witness: bool = True,
                           node_budget: int = 50_000_000) -> Tuple[bool, Optional[PcProof]]:
    """Saturates the degree-d space and tests membership of the constant 1."""
    if d < sys.search_floor_degree():
        raise DegreeTooSmall(f"degree {d} below max effective axiom degree")
    space, refuter = _saturate(sys, d, node_budget)
    if refuter is None:
        return False, None
    if not want_witness:
        return True, None
    proof = _witness_from_trace(space, sys, refuter)
    # the refuting row is normalised, i.e. exactly the constant 1
    assert proof.is_refutation()
    valid, deg = pc_check(proof, sys)
    assert valid and deg <= d
    return True, proof


def pc_min_degree(sys: PolySystem, d_max: int, want_witness: bool = False,
                  node_budget: int = 50_000_000) -> Optional[Tuple[int, Optional[PcProof]]]:
    """Least degree at which saturation refutes the system, or None up to d_max."""
    for d in range(sys.search_floor_degree(), d_max + 1):
        refutable, witness = pc_refutable_at_degree(sys, d, want_witness, node_budget)
        if refutable:
            return d, witness
    return None


def nss_to_pc(sys: PolySystem, cert: NssCertificate) -> PcProof:
    """Replay a Nullstellensatz certificate as a proof: derive every monomial
    multiple of every axiom by repeated multiplication and sum them up."""
    if len(cert.multipliers) != len(sys.axioms):
        raise FieldMismatch("multiplier count mismatch")
    builder = PcBuilder(sys)
    parts: List[Tuple[int, FieldElement]] = []
    for i, g in enumerate(cert.multipliers):
        if g.is_zero() or sys.axioms[i].poly.is_zero():
            continue
        base = builder.initial(i)
        for mono in sorted(g.terms, key=grlex_key, reverse=True):
            ln = builder.mul_chain(base, mono)
            parts.append((ln, g.terms[mono]))
    final = builder.accumulate(parts)
    proof = builder.proof()
    assert proof.lines[final][0] == Polynomial.one(sys.field, sys.cap), \
        "certificate did not sum to 1"
    return proof


# -- proof serialization --------------------------------------------------------


def _fe_to_json(c: FieldElement):
    return c.coeffs[0] if c.field.m == 1 else list(c.coeffs)


def pc_proof_to_jsonl(proof: PcProof) -> str:
    import json

    from .polynomials import poly_to_text

    out = []
    for poly, just in proof.lines:
        kind = just[0]
        rec = {"rule": kind, "poly": poly_to_text(poly)}
        if kind == "boolean":
            rec["var"] = just[1]
        elif kind == "initial":
            rec["index"] = just[1]
        elif kind == "lincomb":
            rec.update({"i": just[1], "j": just[2], "a": _fe_to_json(just[3]),
                        "b": _fe_to_json(just[4])})
        elif kind == "mul":
            rec.update({"i": just[1], "var": just[2]})
        out.append(json.dumps(rec))
    return "\n".join(out) + "\n"


def pc_proof_from_jsonl(text: str, sys: PolySystem) -> PcProof:
    import json

    from .polynomials import poly_from_text

    def fe(v):
        return sys.field.element(tuple(v) if isinstance(v, list) else v)

    lines = []
    for raw in text.splitlines():
        if not raw.strip():
            continue
        rec = json.loads(raw)
        poly = poly_from_text(rec["poly"], sys.field, sys.cap)
        kind = rec["rule"]
        if kind == "boolean":
            just = ("boolean", rec["var"])
        elif kind == "initial":
            just = ("initial", rec["index"])
        elif kind == "lincomb":
            just = ("lincomb", rec["i"], rec["j"], fe(rec["a"]), fe(rec["b"]))
        elif kind == "mul":
            just = ("mul", rec["i"], rec["var"])
        else:
            raise ValueError(f"unknown rule {kind!r}")
        lines.append((poly, just))
    return PcProof(lines)
