"""Cutting planes: proof objects, checker, and the refutation pipeline for
reduced colouring instances.

Rules: variable axioms x >= 0 and -x >= -1, initial axioms, sum, scalar
multiplication by a nonnegative integer, and division by a positive integer
that divides every coefficient (the bound rounds up).  A refutation ends in
0 >= gamma for some gamma >= 1; builders normalise gamma to 1 by a final
division.  Coefficients are arbitrary-precision integers throughout and are
never rescaled.

The pipeline refutes the colouring inequalities of a reduced pigeon-hole
instance by branching over the colourings of the first chain clique,
propagating forced chain colours inside each branch, extracting one
pigeon-hole inequality per gadget, and finishing with the counting
refutation of the recovered pigeon-hole system.  Branches that repeat a
colour die on a clique edge; branches that permute colours reuse the
identity branch with variables renamed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .encodings import (CpLine, CpSystem, colour_var, encode_colouring_cp,
                        encode_fphp_cp, fphp_var)
from .errors import InputNotRefutation, MatchingExists, MissingBranch
from .graphs import FphpInstance
from .oracle import complete_left_matching, hall_violator
from .reduction import GadgetLayout, ReductionOutput

# justifications: ("varaxiom", var) | ("varaxiom_upper", var) | ("initial", idx) |
#                 ("sum", i, j) | ("scalar", i, c) | ("div", i, c)


@dataclass
class CpProof:
    lines: List[Tuple[CpLine, tuple]]

    def __len__(self):
        return len(self.lines)

    def final(self) -> CpLine:
        return self.lines[-1][0]

    def is_refutation(self) -> bool:
        f = self.final()
        return not f.coeffs and f.bound >= 1


@dataclass
class CpCheckResult:
    valid: bool
    length: int
    offending_line: Optional[int] = None
    reason: Optional[str] = None


def line_sum(a: CpLine, b: CpLine) -> CpLine:
    coeffs = dict(a.coeffs)
    for v, c in b.coeffs.items():
        coeffs[v] = coeffs.get(v, 0) + c
    return CpLine(coeffs, a.bound + b.bound)


def line_scale(a: CpLine, c: int) -> CpLine:
    return CpLine({v: c * x for v, x in a.coeffs.items()}, c * a.bound)


def line_div(a: CpLine, c: int) -> Optional[CpLine]:
    if c <= 0 or any(x % c for x in a.coeffs.values()):
        return None
    return CpLine({v: x // c for v, x in a.coeffs.items()}, -((-a.bound) // c))


def cp_check(proof: CpProof, sys: CpSystem) -> CpCheckResult:
    """Replays every rule exactly; division rounds the bound up."""
    lines = proof.lines
    for t, (line, just) in enumerate(lines):
        kind = just[0]
        if kind == "varaxiom":
            expected = CpLine({just[1]: 1}, 0)
        elif kind == "varaxiom_upper":
            expected = CpLine({just[1]: -1}, -1)
        elif kind == "initial":
            idx = just[1]
            if not (0 <= idx < len(sys.lines)):
                return CpCheckResult(False, t, t, "initial index out of range")
            expected = sys.lines[idx][1]
        elif kind == "sum":
            _, i, j = just
            if not (0 <= i < t and 0 <= j < t):
                return CpCheckResult(False, t, t, "forward reference")
            expected = line_sum(lines[i][0], lines[j][0])
        elif kind == "scalar":
            _, i, c = just
            if not (0 <= i < t) or c < 0:
                return CpCheckResult(False, t, t, "bad scalar")
            expected = line_scale(lines[i][0], c)
        elif kind == "div":
            _, i, c = just
            if not 0 <= i < t:
                return CpCheckResult(False, t, t, "forward reference")
            expected = line_div(lines[i][0], c)
            if expected is None:
                return CpCheckResult(False, t, t, "illegal division")
        else:
            return CpCheckResult(False, t, t, f"unknown rule {kind!r}")
        if expected != line:
            return CpCheckResult(False, t, t, "line does not match rule output")
    return CpCheckResult(True, len(lines))


class CpBuilder:
    """Append-only proof construction with replay-exact lines."""

    def __init__(self, sys: CpSystem):
        self.sys = sys
        self.lines: List[Tuple[CpLine, tuple]] = []
        self._upper_cache: Dict[int, int] = {}
        self._axiom_cache: Dict[int, int] = {}

    def line(self, i: int) -> CpLine:
        return self.lines[i][0]

    def _push(self, line: CpLine, just: tuple) -> int:
        self.lines.append((line, just))
        return len(self.lines) - 1

    def varaxiom(self, var: int) -> int:
        if var not in self._axiom_cache:
            self._axiom_cache[var] = self._push(CpLine({var: 1}, 0), ("varaxiom", var))
        return self._axiom_cache[var]

    def varaxiom_upper(self, var: int) -> int:
        if var not in self._upper_cache:
            self._upper_cache[var] = self._push(CpLine({var: -1}, -1), ("varaxiom_upper", var))
        return self._upper_cache[var]

    def initial(self, idx: int) -> int:
        return self._push(CpLine(dict(self.sys.lines[idx][1].coeffs), self.sys.lines[idx][1].bound),
                          ("initial", idx))

    def sum(self, i: int, j: int) -> int:
        return self._push(line_sum(self.line(i), self.line(j)), ("sum", i, j))

    def scalar(self, i: int, c: int) -> int:
        return self._push(line_scale(self.line(i), c), ("scalar", i, c))

    def div(self, i: int, c: int) -> int:
        out = line_div(self.line(i), c)
        assert out is not None, "illegal division in builder"
        return self._push(out, ("div", i, c))

    def sum_many(self, idxs: Sequence[int]) -> int:
        acc = idxs[0]
        for i in idxs[1:]:
            acc = self.sum(acc, i)
        return acc

    def normalise_refutation(self, i: int) -> int:
        """Turn 0 >= gamma (gamma >= 1) into exactly 0 >= 1."""
        line = self.line(i)
        assert not line.coeffs and line.bound >= 1, "not a contradiction line"
        if line.bound == 1:
            return i
        return self.div(i, line.bound)

    def inline(self, sub: CpProof, init_map: Callable[[int], tuple]) -> int:
        """Append a subproof; init_map sends its initial-axiom indices to
        ("initial", outer_idx) or ("line", existing_line_idx)."""
        offset = len(self.lines)
        remap: Dict[int, int] = {}
        for t, (line, just) in enumerate(sub.lines):
            kind = just[0]
            if kind == "initial":
                target = init_map(just[1])
                if target[0] == "initial":
                    remap[t] = self.initial(target[1])
                else:
                    remap[t] = target[1]  # reuse an existing derived line
                    assert self.line(remap[t]) == line, "inlined premise mismatch"
            elif kind in ("varaxiom", "varaxiom_upper"):
                remap[t] = self._push(line, just)
            elif kind == "sum":
                remap[t] = self.sum(remap[just[1]], remap[just[2]])
            elif kind == "scalar":
                remap[t] = self.scalar(remap[just[1]], just[2])
            elif kind == "div":
                remap[t] = self.div(remap[just[1]], just[2])
            else:
                raise ValueError(f"unknown rule {kind!r}")
        return remap[len(sub.lines) - 1]

    def proof(self) -> CpProof:
        return CpProof(list(self.lines))


# -- restriction, weakening, branch composition --------------------------------


def extend_with_assignments(sys: CpSystem, pins: Sequence[Tuple[int, int]]) -> CpSystem:
    """Append x = b as the two inequalities x >= b and -x >= -b, in pin order."""
    lines = list(sys.lines)
    for var, val in pins:
        lines.append(("pin", CpLine({var: 1}, val)))
        lines.append(("pin", CpLine({var: -1}, -val)))
    return CpSystem(lines, sys.n_vars, sys.var_names)


def restrict_cp_system(sys: CpSystem, rho: Dict[int, int]) -> CpSystem:
    out = []
    for tag, line in sys.lines:
        coeffs = {v: c for v, c in line.coeffs.items() if v not in rho}
        bound = line.bound - sum(c * rho[v] for v, c in line.coeffs.items() if v in rho)
        out.append((tag, CpLine(coeffs, bound)))
    return CpSystem(out, sys.n_vars, sys.var_names)


def cp_restrict(proof: CpProof, rho: Dict[int, int], sys: CpSystem) -> Tuple[CpProof, CpSystem]:
    """Proof of the restricted system obtained by restricting every line.

    Variable axioms of assigned variables become 0 >= 0 or 0 >= -1, which are
    manufactured once from the variable axioms of a surviving variable; all
    other rules replay unchanged (division stays legal because assigned
    columns were divisible too).  Length grows by at most three lines.
    """
    restricted = restrict_cp_system(sys, rho)
    builder = CpBuilder(restricted)
    survivor = None
    for v in range(sys.n_vars):
        if v not in rho:
            survivor = v
            break
    zero_line: Optional[int] = None
    minus_one_line: Optional[int] = None

    def get_zero() -> int:
        nonlocal zero_line
        if zero_line is None:
            assert survivor is not None, "restriction assigned every variable"
            zero_line = builder.scalar(builder.varaxiom(survivor), 0)
        return zero_line

    def get_minus_one() -> int:
        nonlocal minus_one_line
        if minus_one_line is None:
            assert survivor is not None, "restriction assigned every variable"
            minus_one_line = builder.sum(builder.varaxiom(survivor),
                                         builder.varaxiom_upper(survivor))
        return minus_one_line

    remap: Dict[int, int] = {}
    for t, (line, just) in enumerate(proof.lines):
        kind = just[0]
        if kind == "varaxiom" and just[1] in rho:
            # x >= 0 restricted by x=b is 0 >= -b
            remap[t] = get_zero() if rho[just[1]] == 0 else get_minus_one()
        elif kind == "varaxiom_upper" and just[1] in rho:
            # -x >= -1 restricted by x=b is 0 >= b-1
            remap[t] = get_zero() if rho[just[1]] == 1 else get_minus_one()
        elif kind in ("varaxiom", "varaxiom_upper"):
            remap[t] = builder._push(line, just)
        elif kind == "initial":
            remap[t] = builder.initial(just[1])
        elif kind == "sum":
            remap[t] = builder.sum(remap[just[1]], remap[just[2]])
        elif kind == "scalar":
            remap[t] = builder.scalar(remap[just[1]], just[2])
        elif kind == "div":
            remap[t] = builder.div(remap[just[1]], just[2])
        else:
            raise ValueError(f"unknown rule {kind!r}")
    return builder.proof(), restricted


WEAKEN_LENGTH_FACTOR = 5  # lifted length <= 5 * original length


def cp_weaken(proof: CpProof, sys: CpSystem, x: int, b: int,
              expect_refutation: bool = True) -> Tuple[CpProof, int]:
    """Lift a refutation of sys + {x = b} to a derivation from sys alone.

    Follows the inductive transform: every line picks up a multiple K of
    (x - b); the lost pin axiom becomes 0 >= 0 with K = 1, sums add their Ks,
    scalars multiply them, and division first pads K to a multiple of the
    divisor using the surviving variable axiom of x.  The final line of a
    refutation becomes K(x - b) + gamma <= 0 in <= form.
    """
    if b not in (0, 1):
        raise ValueError("assignment value must be 0 or 1")
    if expect_refutation and not proof.is_refutation():
        raise InputNotRefutation("weakening expects a refutation of the pinned system")
    ext = extend_with_assignments(sys, [(x, b)])
    n = len(sys.lines)
    lost_key = CpLine({x: 1}, b).key() if b == 1 else CpLine({x: -1}, 0).key()
    builder = CpBuilder(sys)
    remap: Dict[int, int] = {}
    kmap: Dict[int, int] = {}

    def lifted_check(t: int):
        # lifted line must equal original + K * (x - b side)
        orig = proof.lines[t][0]
        k = kmap[t]
        coeffs = dict(orig.coeffs)
        if k:
            coeffs[x] = coeffs.get(x, 0) + (-k if b == 1 else k)
            if coeffs.get(x) == 0:
                del coeffs[x]
        expected = CpLine(coeffs, orig.bound - k * b)
        assert builder.line(remap[t]) == expected, f"lift drifted at line {t}"

    for t, (line, just) in enumerate(proof.lines):
        kind = just[0]
        if kind == "initial" and just[1] >= n:
            pin_line = ext.lines[just[1]][1]
            if pin_line.key() == lost_key:
                # becomes 0 >= 0 with K = 1
                remap[t] = builder.scalar(builder.varaxiom(x), 0)
                kmap[t] = 1
            else:
                # the kept half is an ordinary variable axiom
                if b == 1:
                    remap[t] = builder.varaxiom_upper(x)
                else:
                    remap[t] = builder.varaxiom(x)
                kmap[t] = 0
        elif kind == "initial":
            remap[t] = builder.initial(just[1])
            kmap[t] = 0
        elif kind in ("varaxiom", "varaxiom_upper"):
            remap[t] = builder._push(line, just)
            kmap[t] = 0
        elif kind == "sum":
            _, i, j = just
            remap[t] = builder.sum(remap[i], remap[j])
            kmap[t] = kmap[i] + kmap[j]
        elif kind == "scalar":
            _, i, c = just
            remap[t] = builder.scalar(remap[i], c)
            kmap[t] = c * kmap[i]
        elif kind == "div":
            _, i, c = just
            k = kmap[i]
            src = remap[i]
            if k % c:
                pad = c * (-(-k // c)) - k  # smallest K' = 0 (mod c), K' >= k
                axiom = builder.varaxiom_upper(x) if b == 1 else builder.varaxiom(x)
                padded = builder.sum(src, builder.scalar(axiom, pad))
                src = padded
                k += pad
            remap[t] = builder.div(src, c)
            kmap[t] = k // c
        else:
            raise ValueError(f"unknown rule {kind!r}")
        lifted_check(t)
    out = builder.proof()
    assert len(out) <= WEAKEN_LENGTH_FACTOR * len(proof), "weakening blew the length bound"
    return out, kmap[len(proof.lines) - 1]


COMPOSE_GLUE_PER_LEVEL = lambda k: 2 * k + 1  # noqa: E731  k post-lift lines, axiom, k sums


def cp_branch_compose(sys: CpSystem, groups: Sequence[Sequence[int]], k: int,
                      subproofs: Dict[Tuple[int, ...], CpProof]) -> CpProof:
    """Combine refutations of sys + {x_{u_t, c_t} = 1 for all t} over every
    colour tuple into one refutation of sys.

    groups[t] lists the colour variables of branch vertex u_t.  At each level
    every branch is lifted off its last pin, divided down to x <= 0, and the
    k results are summed with the vertex axiom sum_c x >= 1.
    """
    if any(len(g) != k for g in groups):
        raise ValueError("every group needs exactly k colour variables")
    index = sys.index_by_key()

    def compose(prefix: Tuple[int, ...], cur_sys: CpSystem) -> CpProof:
        level = len(prefix)
        if level == len(groups):
            if prefix not in subproofs:
                raise MissingBranch(f"no subproof for colour tuple {prefix}")
            return subproofs[prefix]
        group = groups[level]
        builder = CpBuilder(cur_sys)
        per_colour: List[int] = []
        for c in range(k):
            branch = compose(prefix + (c,),
                             extend_with_assignments(cur_sys, [(group[c], 1)]))
            lifted, kc = cp_weaken(branch, cur_sys, group[c], 1)
            fin = builder.inline(lifted, lambda idx: ("initial", idx))
            if kc == 0:
                # branch never used its pin: its contradiction stands alone;
                # shape it into -x >= 0 via the upper variable axiom
                per_colour.append(builder.sum(fin, builder.varaxiom_upper(group[c])))
            else:
                per_colour.append(builder.div(fin, kc))
        axiom_key = CpLine({v: 1 for v in group}, 1).key()
        assert axiom_key in index, "missing vertex axiom for branch group"
        acc = builder.initial(index[axiom_key])
        for ln in per_colour:
            acc = builder.sum(acc, ln)
        builder.normalise_refutation(acc)
        return builder.proof()

    return compose((), sys)


# -- counting refutation of pigeon-hole inequalities ----------------------------


def _at_most_one_ladder(builder: CpBuilder, members: List[int],
                        pair_ref: Callable[[int, int], int]) -> int:
    """Derive -(sum of members) >= -1 from pairwise at-most-one lines.

    pair_ref(a, b) returns a line index asserting -x_a - x_b >= -1.
    Standard clique counting: add the new member against the current set,
    mix with the inductive line, divide by the set size.
    """
    assert len(members) >= 2
    acc = pair_ref(members[0], members[1])
    for m in range(2, len(members)):
        pair_lines = [pair_ref(members[t], members[m]) for t in range(m)]
        b_line = builder.sum_many(pair_lines)
        scaled = builder.scalar(acc, m - 1)
        mixed = builder.sum(scaled, b_line)
        acc = builder.div(mixed, m)
    return acc


def _counting_contradiction(builder: CpBuilder, b: FphpInstance, pigeons: List[int],
                            pigeon_ref: Callable[[int], int],
                            collision_ref: Callable[[int, int, int], int]) -> int:
    """0 >= 1 from a Hall violator: per-hole at-most-one ladders plus the
    pigeon axioms, summed and normalised.

    pigeon_ref(i) gives the line sum_{c} p_{i,*} >= 1; collision_ref(i,i',j)
    gives -p_{i,j} - p_{i',j} >= -1 for i < i'.
    """
    holes = sorted({j for i in pigeons for j in b.neighbours[i]})
    hole_lines = []
    for j in holes:
        members = [i for i in pigeons if j in b.neighbours[i]]
        if len(members) == 1:
            i = members[0]
            hole_lines.append(builder.varaxiom_upper(_pvar(b, i, j)))
        else:
            hole_lines.append(_at_most_one_ladder(
                builder, members,
                lambda a, c, j=j: collision_ref(min(a, c), max(a, c), j)))
    holes_total = builder.sum_many(hole_lines)
    pigeon_total = builder.sum_many([pigeon_ref(i) for i in pigeons])
    contradiction = builder.sum(pigeon_total, holes_total)
    line = builder.line(contradiction)
    assert not line.coeffs and line.bound == len(pigeons) - len(holes) >= 1
    return builder.normalise_refutation(contradiction)


def _pvar(b: FphpInstance, i: int, j: int) -> int:
    return fphp_var(i, b.edge_label(i, j), b.left_degree)


def cp_refute_php(b: FphpInstance) -> Tuple[CpSystem, CpProof]:
    """Counting refutation of the pigeon-hole inequalities over a Hall
    violator; raises MatchingExists when the instance is satisfiable."""
    if complete_left_matching(b) is not None:
        raise MatchingExists("instance admits a complete left matching")
    violator = hall_violator(b)
    sys = encode_fphp_cp(b)
    index = sys.index_by_key()
    builder = CpBuilder(sys)
    pigeon_cache: Dict[int, int] = {}
    coll_cache: Dict[Tuple[int, int, int], int] = {}

    def pigeon_ref(i: int) -> int:
        if i not in pigeon_cache:
            key = CpLine({fphp_var(i, c, b.left_degree): 1 for c in range(b.left_degree)}, 1).key()
            pigeon_cache[i] = builder.initial(index[key])
        return pigeon_cache[i]

    def collision_ref(i: int, ip: int, j: int) -> int:
        if (i, ip, j) not in coll_cache:
            key = CpLine.at_most({_pvar(b, i, j): 1, _pvar(b, ip, j): 1}, 1).key()
            coll_cache[(i, ip, j)] = builder.initial(index[key])
        return coll_cache[(i, ip, j)]

    _counting_contradiction(builder, b, violator, pigeon_ref, collision_ref)
    return sys, builder.proof()


# -- gadget fragments -----------------------------------------------------------


def _gadget_local_system(sys: CpSystem, gadget: GadgetLayout, k: int
                         ) -> Tuple[CpSystem, List[int], Dict[tuple, int]]:
    """The gadget's own inequalities (vertex sums of clique vertices, all
    edges inside the gadget, and the merged vertex's colour-pair exclusions),
    keyed back to the outer system."""
    index = sys.index_by_key()
    keep: List[int] = []
    seen = set()
    internal = [v for v in gadget.internal_vertices()
                if v not in (gadget.precoloured[0][0], gadget.precoloured[1][0])]
    for v in internal:
        key = CpLine({colour_var(v, j, k): 1 for j in range(k)}, 1).key()
        keep.append(index[key])
    for u, v in gadget.edges():
        for j in range(k):
            key = CpLine.at_most({colour_var(u, j, k): 1, colour_var(v, j, k): 1}, 1).key()
            idx = index.get(key)
            if idx is not None and idx not in seen:
                seen.add(idx)
                keep.append(idx)
    if gadget.variant == "merged":
        z = gadget.left_clique[k - 1]
        c, cp = sorted(gadget.colours)
        key = CpLine.at_most({colour_var(z, c, k): 1, colour_var(z, cp, k): 1}, 1).key()
        keep.append(index[key])
    local_lines = [(sys.lines[i][0], sys.lines[i][1]) for i in keep]
    local = CpSystem(local_lines, sys.n_vars, sys.var_names)
    local_index = local.index_by_key()
    return local, keep, local_index


def _gadget_ladder_refutation(local_ext: CpSystem, gadget: GadgetLayout, k: int) -> CpProof:
    """Refute gadget + {w pins} + {pigeon pins} by clique counting: the pinned
    side colours force both clique ends, which collide on the final edge or
    inside the merged vertex."""
    index = local_ext.index_by_key()
    builder = CpBuilder(local_ext)

    def ref(key) -> int:
        return builder.initial(index[key.key()])

    def forced_end(pigeon: int, clique: Tuple[int, ...], w: int, col: int) -> int:
        # colour bounds for every other colour inside the clique
        bounds = []
        for j in range(k):
            if j == col:
                continue
            bounds.append(_at_most_one_ladder(
                builder, list(clique),
                lambda a, c2, j=j: ref(CpLine.at_most(
                    {colour_var(a, j, k): 1, colour_var(c2, j, k): 1}, 1))))
        vertex_sum = builder.sum_many(
            [ref(CpLine({colour_var(v, j, k): 1 for j in range(k)}, 1)) for v in clique])
        acc = builder.sum(vertex_sum, builder.sum_many(bounds))
        # remove the first clique vertex via the pigeon pin, the middle ones
        # via the w pin
        pin = ref(CpLine({colour_var(pigeon, col, k): 1}, 1))
        edge = ref(CpLine.at_most({colour_var(pigeon, col, k): 1,
                                   colour_var(clique[0], col, k): 1}, 1))
        acc = builder.sum(acc, builder.sum(pin, edge))
        wpin = ref(CpLine({colour_var(w, col, k): 1}, 1))
        for t in range(1, k - 1):
            edge = ref(CpLine.at_most({colour_var(w, col, k): 1,
                                       colour_var(clique[t], col, k): 1}, 1))
            acc = builder.sum(acc, builder.sum(wpin, edge))
        line = builder.line(acc)
        assert line.coeffs == {colour_var(clique[k - 1], col, k): 1} and line.bound >= 1
        return acc

    i, ip = gadget.pigeons
    c, cp = gadget.colours
    w, wp = gadget.precoloured[0][0], gadget.precoloured[1][0]
    left_end = forced_end(i, gadget.left_clique, w, c)
    right_end = forced_end(ip, gadget.right_clique, wp, cp)
    if gadget.variant == "edge":
        clash = ref(CpLine.at_most({colour_var(gadget.left_clique[k - 1], c, k): 1,
                                    colour_var(gadget.right_clique[k - 1], c, k): 1}, 1))
    else:
        z = gadget.left_clique[k - 1]
        lo, hi = sorted(gadget.colours)
        clash = ref(CpLine.at_most({colour_var(z, lo, k): 1, colour_var(z, hi, k): 1}, 1))
    contradiction = builder.sum(builder.sum(left_end, right_end), clash)
    line = builder.line(contradiction)
    assert not line.coeffs and line.bound >= 1
    builder.normalise_refutation(contradiction)
    return builder.proof()


def _gadget_branching_refutation(local: CpSystem, gadget: GadgetLayout, k: int) -> CpProof:
    """Refute gadget + pins by full branching over the clique vertices; each
    leaf colouring violates some inequality outright."""
    internal = [v for v in gadget.internal_vertices()
                if v not in (gadget.precoloured[0][0], gadget.precoloured[1][0])]
    groups = [[colour_var(v, j, k) for j in range(k)] for v in internal]
    pinned_base = {
        gadget.pigeons[0]: gadget.colours[0],
        gadget.pigeons[1]: gadget.colours[1],
        gadget.precoloured[0][0]: gadget.precoloured[0][1],
        gadget.precoloured[1][0]: gadget.precoloured[1][1],
    }
    subproofs: Dict[Tuple[int, ...], CpProof] = {}
    for tup in itertools.product(range(k), repeat=len(internal)):
        pins = dict(pinned_base)
        pins.update({v: c for v, c in zip(internal, tup)})
        leaf_sys = extend_with_assignments(
            local, [(colour_var(v, c, k), 1) for v, c in zip(internal, tup)])
        idx = leaf_sys.index_by_key()
        builder = CpBuilder(leaf_sys)
        # find a violated at-most-one line among the pinned vertices
        hit = None
        for u, v in gadget.edges():
            if pins[u] == pins[v]:
                hit = (colour_var(u, pins[u], k), colour_var(v, pins[v], k))
                break
        assert hit is not None, "leaf colouring unexpectedly legal"
        a, bvar = hit
        clash = builder.initial(idx[CpLine.at_most({a: 1, bvar: 1}, 1).key()])
        pin_a = builder.initial(idx[CpLine({a: 1}, 1).key()])
        pin_b = builder.initial(idx[CpLine({bvar: 1}, 1).key()])
        builder.sum(builder.sum(clash, pin_a), pin_b)
        builder.normalise_refutation(len(builder.lines) - 1)
        subproofs[tup] = builder.proof()
    return cp_branch_compose(local, groups, k, subproofs)


def cp_refute_gadget(sys: CpSystem, gadget: GadgetLayout, k: int,
                     method: str = "ladder") -> Tuple[CpSystem, CpProof]:
    """Derive -x_{i,c} - x_{i',c'} >= -1 from the gadget inequalities plus the
    two pre-coloured pins, as a standalone proof over the gadget-local system
    extended with those pins.

    The inner refutation of gadget + {both pigeon pins} comes either from
    clique counting ("ladder", the default) or from full branching over the
    clique vertices ("branching"); two weakenings then lift off the pigeon
    pins, the two K factors are padded equal, and one division produces the
    pigeon-hole inequality.
    """
    i, ip = gadget.pigeons
    c, cp = gadget.colours
    local, _, _ = _gadget_local_system(sys, gadget, k)
    w, cw = gadget.precoloured[0]
    wp, cwp = gadget.precoloured[1]
    with_w = extend_with_assignments(local, [(colour_var(w, cw, k), 1),
                                             (colour_var(wp, cwp, k), 1)])
    xi = colour_var(i, c, k)
    xip = colour_var(ip, cp, k)
    pinned = extend_with_assignments(with_w, [(xi, 1), (xip, 1)])
    if method == "ladder":
        inner = _gadget_ladder_refutation(pinned, gadget, k)
    elif method == "branching":
        inner = _gadget_branching_refutation(pinned, gadget, k)
    else:
        raise ValueError("method must be 'ladder' or 'branching'")
    res = cp_check(inner, pinned)
    assert res.valid, f"inner gadget refutation invalid at {res.offending_line}: {res.reason}"
    step1, _ = cp_weaken(inner, extend_with_assignments(with_w, [(xi, 1)]), xip, 1)
    step2, _ = cp_weaken(step1, with_w, xi, 1, expect_refutation=False)
    builder = CpBuilder(with_w)
    fin = builder.inline(step2, lambda idx: ("initial", idx))
    # equalise the two pin multiples and divide
    line = builder.line(fin)
    k1_, k2_ = -line.coeffs.get(xi, 0), -line.coeffs.get(xip, 0)
    kk = max(k1_, k2_, 1)
    for var, kv in ((xi, k1_), (xip, k2_)):
        if kv < kk:
            pad = builder.scalar(builder.varaxiom_upper(var), kk - kv)
            fin = builder.sum(fin, pad)
    out = builder.div(fin, kk)
    got = builder.line(out)
    want = CpLine({xi: -1, xip: -1}, -1)
    assert got.coeffs == want.coeffs and got.bound >= want.bound, "gadget fragment drifted"
    return with_w, builder.proof()


# -- the full pipeline ----------------------------------------------------------


def _rename_proof(proof: CpProof, var_map: Callable[[int], int],
                  sys_from: CpSystem, sys_to: CpSystem) -> CpProof:
    """Variable renaming as a metafunction on proofs: coefficients move to the
    renamed variables and initial indices follow the renamed inequalities."""
    index_to = sys_to.index_by_key()

    def rename_line(line: CpLine) -> CpLine:
        return CpLine({var_map(v): c for v, c in line.coeffs.items()}, line.bound)

    lines: List[Tuple[CpLine, tuple]] = []
    for line, just in proof.lines:
        kind = just[0]
        if kind == "initial":
            renamed = rename_line(sys_from.lines[just[1]][1])
            lines.append((rename_line(line), ("initial", index_to[renamed.key()])))
        elif kind in ("varaxiom", "varaxiom_upper"):
            lines.append((rename_line(line), (kind, var_map(just[1]))))
        else:
            lines.append((rename_line(line), just))
    return CpProof(lines)


REDUCTION_LENGTH_FACTOR = 60  # pinned constant for the pipeline length bound


def reduction_length_bound(out: ReductionOutput) -> int:
    """Declared polynomial length bound for the pipeline at fixed k."""
    k = out.k
    n_g = len(out.gadget_index)
    b = out.instance
    return (REDUCTION_LENGTH_FACTOR * (k ** k) *
            (k**3 * n_g + k * out.chain_length + (b.n_pigeons + b.n_holes) ** 3 + k**3))


def cp_refute_reduction(out: ReductionOutput, gadget_method: str = "ladder") -> Tuple[CpSystem, CpProof]:
    """Refutation of the colouring inequalities of a reduced instance.

    Branch over the colourings of the first chain clique; in each proper
    branch propagate chain colours, derive one pigeon-hole inequality per
    gadget, and finish with hole-wise counting; duplicate-colour branches die
    on a clique edge; permuted branches reuse the identity branch renamed.
    """
    b = out.instance
    k = out.k
    if complete_left_matching(b) is not None:
        raise MatchingExists("reduced instance is satisfiable; nothing to refute")
    sys = encode_colouring_cp(out.graph, k)
    chain = [out.chain_vertex(t) for t in range(out.chain_length)]

    identity_pins = [(colour_var(chain[t], t % k, k), 1) for t in range(k)]
    id_sys = extend_with_assignments(sys, identity_pins)
    id_index = id_sys.index_by_key()
    builder = CpBuilder(id_sys)

    # chain propagation: x_{r_t, t mod k} >= 1 for every chain slot
    lower: Dict[int, int] = {}
    for t in range(k):
        lower[chain[t]] = builder.initial(id_index[CpLine({identity_pins[t][0]: 1}, 1).key()])
    for t in range(k, out.chain_length):
        v = chain[t]
        target = t % k
        drops = []
        for s in range(t - k + 1, t):
            j = s % k
            edge_key = CpLine.at_most({colour_var(chain[s], j, k): 1,
                                       colour_var(v, j, k): 1}, 1).key()
            drops.append(builder.sum(lower[chain[s]], builder.initial(id_index[edge_key])))
        vertex = builder.initial(id_index[CpLine({colour_var(v, j, k): 1 for j in range(k)}, 1).key()])
        lower[v] = builder.sum_many([vertex] + drops)
        got = builder.line(lower[v])
        assert got.coeffs == {colour_var(v, target, k): 1} and got.bound >= 1

    # one pigeon-hole inequality per gadget
    collision_lines: Dict[Tuple[int, int, int], int] = {}
    for gadget in out.gadget_index:
        local_ext, fragment = cp_refute_gadget(sys, gadget, k, method=gadget_method)
        w, cw = gadget.precoloured[0]
        wp, cwp = gadget.precoloured[1]

        def premise_map(idx: int, local_ext=local_ext, w=w, cw=cw, wp=wp, cwp=cwp):
            tag, line = local_ext.lines[idx]
            if tag == "pin":
                if line.key() == CpLine({colour_var(w, cw, k): 1}, 1).key():
                    return ("line", lower[w])
                if line.key() == CpLine({colour_var(wp, cwp, k): 1}, 1).key():
                    return ("line", lower[wp])
                # the upper halves of the pins are never used by the fragment
                raise AssertionError("fragment used an upper pin half")
            return ("initial", id_index[line.key()])

        fin = builder.inline(fragment, premise_map)
        i, ip = gadget.pigeons
        collision_lines[(i, ip, gadget.hole)] = fin

    # counting over the recovered pigeon-hole system
    violator = hall_violator(b)
    pigeon_cache: Dict[int, int] = {}

    def pigeon_ref(i: int) -> int:
        if i not in pigeon_cache:
            key = CpLine({colour_var(out.pigeon_vertex[i], c, k): 1 for c in range(k)}, 1).key()
            pigeon_cache[i] = builder.initial(id_index[key])
        return pigeon_cache[i]

    def collision_ref(i: int, ip: int, j: int) -> int:
        return collision_lines[(i, ip, j)]

    # pigeon-hole variables coincide with pigeon-vertex colour variables
    _counting_contradiction(builder, b, violator, pigeon_ref, collision_ref)
    identity_proof = builder.proof()

    subproofs: Dict[Tuple[int, ...], CpProof] = {}
    for tup in itertools.product(range(k), repeat=k):
        if len(set(tup)) == k:
            sigma = {t % k: tup[t] for t in range(k)}
            perm_pins = [(colour_var(chain[t], tup[t], k), 1) for t in range(k)]
            perm_sys = extend_with_assignments(sys, perm_pins)

            def var_map(x: int, sigma=sigma) -> int:
                v, j = divmod(x, k)
                return colour_var(v, sigma[j], k)

            subproofs[tup] = _rename_proof(identity_proof, var_map, id_sys, perm_sys)
        else:
            dup_sys = extend_with_assignments(
                sys, [(colour_var(chain[t], tup[t], k), 1) for t in range(k)])
            dup_index = dup_sys.index_by_key()
            dup = CpBuilder(dup_sys)
            s, t = next((s, t) for s in range(k) for t in range(s + 1, k) if tup[s] == tup[t])
            c = tup[s]
            pin_s = dup.initial(dup_index[CpLine({colour_var(chain[s], c, k): 1}, 1).key()])
            pin_t = dup.initial(dup_index[CpLine({colour_var(chain[t], c, k): 1}, 1).key()])
            edge = dup.initial(dup_index[CpLine.at_most(
                {colour_var(chain[s], c, k): 1, colour_var(chain[t], c, k): 1}, 1).key()])
            dup.normalise_refutation(dup.sum(dup.sum(pin_s, pin_t), edge))
            subproofs[tup] = dup.proof()

    groups = [[colour_var(chain[t], j, k) for j in range(k)] for t in range(k)]
    proof = cp_branch_compose(sys, groups, k, subproofs)
    return sys, proof


# -- serialization --------------------------------------------------------------


def cp_proof_to_jsonl(proof: CpProof) -> str:
    import json

    out = []
    for line, just in proof.lines:
        rec = {"rule": just[0],
               "line": {"coeffs": {str(v): c for v, c in sorted(line.coeffs.items())},
                        "bound": line.bound}}
        if just[0] in ("varaxiom", "varaxiom_upper"):
            rec["var"] = just[1]
        elif just[0] == "initial":
            rec["index"] = just[1]
        elif just[0] == "sum":
            rec["i"], rec["j"] = just[1], just[2]
        elif just[0] in ("scalar", "div"):
            rec["i"], rec["c"] = just[1], just[2]
        out.append(json.dumps(rec))
    return "\n".join(out) + "\n"


def cp_proof_from_jsonl(text: str) -> CpProof:
    import json

    lines = []
    for raw in text.splitlines():
        if not raw.strip():
            continue
        rec = json.loads(raw)
        line = CpLine({int(v): c for v, c in rec["line"]["coeffs"].items()},
                      rec["line"]["bound"])
        kind = rec["rule"]
        if kind in ("varaxiom", "varaxiom_upper"):
            just = (kind, rec["var"])
        elif kind == "initial":
            just = (kind, rec["index"])
        elif kind == "sum":
            just = (kind, rec["i"], rec["j"])
        elif kind in ("scalar", "div"):
            just = (kind, rec["i"], rec["c"])
        else:
            raise ValueError(f"unknown rule {kind!r}")
        lines.append((line, just))
    return CpProof(lines)
