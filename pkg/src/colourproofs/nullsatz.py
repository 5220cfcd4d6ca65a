"""Bounded-degree Nullstellensatz certificate search.

Decides whether multipliers g_i of bounded degree exist with
sum_i g_i f_i = 1 (under the system's exponent cap) by solving one exact
linear system over the unknown multiplier coefficients: one unknown per
(axiom, monomial) pair, one equation per monomial of the expanded sum.

Degree accounting is pre-reduction: a certificate's degree is
max_i deg(g_i) + deg(f_i) over the nonzero multipliers, where deg(f_i) is
the axiom's nominal (unreduced) degree.  Cap generators such as x^2 - x and
y^k - 1 reduce to zero, so their multiplier slots exist but never matter;
the cap itself plays their role.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from .encodings import PolySystem
from .errors import BudgetExceeded, DegreeTooSmall, FieldMismatch
from .fields import FieldElement
from .linalg import solve_linear
from .polynomials import (MONO_ONE, Monomial, Polynomial, cap_k, cap_kind,
                          cap_reduce_mono, mono_degree, mono_mul, poly_from_text,
                          poly_to_text)

DEFAULT_CELL_BUDGET = 300_000_000


@dataclass
class NssCertificate:
    multipliers: List[Polynomial]
    degree: int


def monomials_up_to(variables: List[int], max_deg: int, cap: str) -> List[Monomial]:
    """All cap-reduced monomials over the given variables of degree <= max_deg,
    in a deterministic order."""
    kind = cap_kind(cap)
    if max_deg < 0:
        return []
    if kind == "boolean":
        out: List[Monomial] = []
        for size in range(0, min(max_deg, len(variables)) + 1):
            for combo in itertools.combinations(variables, size):
                out.append(tuple((v, 1) for v in combo))
        return out
    if kind == "roots":
        k = cap_k(cap)
        out = [MONO_ONE]
        for var in sorted(variables):
            additions: List[Monomial] = []
            for m in out:
                for e in range(1, k):
                    if mono_degree(m) + e > max_deg:
                        break
                    additions.append(m + ((var, e),))
            out.extend(additions)
        return out
    raise ValueError("uncapped systems are not supported by the searcher")


def nss_feasible_at_degree(sys: PolySystem, d: int,
                           cell_budget: int = DEFAULT_CELL_BUDGET) -> Optional[NssCertificate]:
    """A degree-d certificate if one exists, else None.

    Unknowns are the coefficients of each multiplier over all cap-reduced
    monomials of degree <= d - deg(f_i); the equations say the reduced
    expansion equals the constant 1.
    """
    if d < sys.search_floor_degree():
        raise DegreeTooSmall(f"degree {d} below max effective axiom degree {sys.search_floor_degree()}")
    variables = sys.variables()
    columns: List[Tuple[int, Monomial]] = []
    for i, axiom in enumerate(sys.axioms):
        if axiom.poly.is_zero():
            continue  # cap generator; its content lives in the reduction
        for m in monomials_up_to(variables, d - axiom.nominal_degree, sys.cap):
            columns.append((i, m))

    row_of: Dict[Monomial, int] = {}
    rows: List[Dict[int, FieldElement]] = []
    cells = 0
    for col_idx, (i, m) in enumerate(columns):
        for t, c in sys.axioms[i].poly.terms.items():
            mono = cap_reduce_mono(mono_mul(m, t), sys.cap)
            r = row_of.get(mono)
            if r is None:
                r = len(rows)
                row_of[mono] = r
                rows.append({})
            if col_idx in rows[r]:
                s = rows[r][col_idx] + c
                if s.is_zero():
                    del rows[r][col_idx]
                else:
                    rows[r][col_idx] = s
            else:
                rows[r][col_idx] = c
            cells += 1
    if len(rows) * max(len(columns), 1) > cell_budget:
        raise BudgetExceeded(
            f"certificate system too large: {len(rows)} equations x {len(columns)} unknowns")

    rhs = [sys.field.zero] * len(rows)
    if MONO_ONE in row_of:
        rhs[row_of[MONO_ONE]] = sys.field.one
    else:
        # the constant monomial never appears: the sum can never be 1
        return None

    sol = solve_linear(rows, len(columns), rhs, sys.field)
    if sol is None:
        return None
    multipliers = [Polynomial.zero(sys.field, sys.cap) for _ in sys.axioms]
    grouped: Dict[int, List[Tuple[Monomial, FieldElement]]] = {}
    for col_idx, (i, m) in enumerate(columns):
        v = sol[col_idx]
        if not v.is_zero():
            grouped.setdefault(i, []).append((m, v))
    degree = 0
    for i, terms in grouped.items():
        multipliers[i] = Polynomial.from_terms(sys.field, sys.cap, terms)
        degree = max(degree, multipliers[i].degree + sys.axioms[i].nominal_degree)
    cert = NssCertificate(multipliers, degree)
    assert verify_certificate(sys, cert), "searcher produced a non-verifying certificate"
    return cert


def nss_min_degree(sys: PolySystem, d_max: int,
                   cell_budget: int = DEFAULT_CELL_BUDGET) -> Optional[Tuple[int, NssCertificate]]:
    """Smallest d with a degree-d certificate, searched ascending; None when
    every degree up to d_max is infeasible."""
    for d in range(sys.search_floor_degree(), d_max + 1):
        cert = nss_feasible_at_degree(sys, d, cell_budget)
        if cert is not None:
            return d, cert
    return None


def verify_certificate(sys: PolySystem, cert: NssCertificate) -> bool:
    """Checks sum g_i f_i = 1 by direct polynomial expansion, independently of
    the matrix assembly in the searcher."""
    if len(cert.multipliers) != len(sys.axioms):
        raise FieldMismatch("multiplier count does not match axiom count")
    total = Polynomial.zero(sys.field, sys.cap)
    for g, axiom in zip(cert.multipliers, sys.axioms):
        if g.field != sys.field or g.cap != sys.cap:
            raise FieldMismatch("multiplier in wrong field or cap")
        if g.is_zero() or axiom.poly.is_zero():
            continue
        total = total + g * axiom.poly
    return total == Polynomial.one(sys.field, sys.cap)


# -- serialization -------------------------------------------------------------


def system_content_hash(sys: PolySystem) -> str:
    from .encodings import poly_system_to_text

    return hashlib.sha256(poly_system_to_text(sys).encode()).hexdigest()[:16]


def certificate_to_text(sys: PolySystem, cert: NssCertificate) -> str:
    from .polynomials import cap_header

    lines = [
        f"nss-certificate system={system_content_hash(sys)} degree={cert.degree}",
        sys.field.header(),
        cap_header(sys.cap),
    ]
    lines.extend(poly_to_text(g) for g in cert.multipliers)
    return "\n".join(lines) + "\n"


def certificate_from_text(text: str, sys: PolySystem) -> NssCertificate:
    raw = [ln for ln in text.splitlines() if ln.strip()]
    head = dict(tok.split("=", 1) for tok in raw[0].split()[1:])
    if head["system"] != system_content_hash(sys):
        raise ValueError("certificate bound to a different system")
    multipliers = [poly_from_text(ln, sys.field, sys.cap) for ln in raw[3:]]
    return NssCertificate(multipliers, int(head["degree"]))
