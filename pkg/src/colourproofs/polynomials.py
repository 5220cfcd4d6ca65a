"""Capped-exponent sparse multivariate polynomials.

A monomial is a sorted tuple of (variable id, exponent) pairs with positive
exponents.  Every polynomial carries an exponent cap describing the quotient
it lives in:

  * ``"boolean"``  - exponents collapse to 1 (working modulo x^2 - x on 0/1
    points),
  * ``"roots:k"``  - exponents wrap modulo k (working modulo y^k - 1 on k-th
    roots of unity),
  * ``None``       - the free polynomial ring.

Multiplication, substitution and parsing reduce under the cap; addition never
needs to.  The canonical monomial order used for printing and linear-algebra
column order is graded lexicographic by variable id.
"""

from __future__ import annotations

from typing import Dict, Iterable, Mapping, Optional, Tuple

from .errors import FieldMismatch, UnboundVariable
from .fields import FieldElement, FieldSpec, field_spec_from_header

Monomial = Tuple[Tuple[int, int], ...]
MONO_ONE: Monomial = ()


def cap_kind(cap: Optional[str]) -> str:
    if cap is None:
        return "free"
    if cap == "boolean":
        return "boolean"
    if cap.startswith("roots:"):
        return "roots"
    raise ValueError(f"unknown cap {cap!r}")


def cap_k(cap: str) -> int:
    return int(cap.split(":", 1)[1])


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for v, e in b:
        merged[v] = merged.get(v, 0) + e
    return tuple(sorted(merged.items()))


def cap_reduce_mono(m: Monomial, cap: Optional[str]) -> Monomial:
    if cap is None:
        return m
    if cap == "boolean":
        return tuple((v, 1) for v, _ in m)
    k = cap_k(cap)
    out = []
    for v, e in m:
        r = e % k
        if r:
            out.append((v, r))
    return tuple(out)


def grlex_key(m: Monomial):
    """Sort key; larger key = larger monomial in graded lex order."""
    return (mono_degree(m), tuple((-v, e) for v, e in m))


class Polynomial:
    __slots__ = ("field", "cap", "terms")

    def __init__(self, field: FieldSpec, cap: Optional[str], terms: Dict[Monomial, FieldElement]):
        # terms are assumed cap-reduced, merged, and free of zero coefficients
        self.field = field
        self.cap = cap
        self.terms = terms

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_terms(cls, field: FieldSpec, cap: Optional[str],
                   items: Iterable[Tuple[Monomial, FieldElement]]) -> "Polynomial":
        acc: Dict[Monomial, FieldElement] = {}
        for mono, coeff in items:
            mono = cap_reduce_mono(tuple(sorted(mono)), cap)
            if mono in acc:
                acc[mono] = acc[mono] + coeff
            else:
                acc[mono] = coeff
        return cls(field, cap, {m: c for m, c in acc.items() if not c.is_zero()})

    @classmethod
    def zero(cls, field: FieldSpec, cap: Optional[str]) -> "Polynomial":
        return cls(field, cap, {})

    @classmethod
    def constant(cls, field: FieldSpec, cap: Optional[str], value) -> "Polynomial":
        c = field.element(value)
        return cls(field, cap, {} if c.is_zero() else {MONO_ONE: c})

    @classmethod
    def one(cls, field: FieldSpec, cap: Optional[str]) -> "Polynomial":
        return cls.constant(field, cap, 1)

    @classmethod
    def variable(cls, field: FieldSpec, cap: Optional[str], var: int, exp: int = 1) -> "Polynomial":
        return cls.from_terms(field, cap, [(((var, exp),), field.one)])

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.field != other.field or self.cap != other.cap:
            raise FieldMismatch("polynomials disagree on field or cap")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            if m in out:
                s = out[m] + c
                if s.is_zero():
                    del out[m]
                else:
                    out[m] = s
            else:
                out[m] = c
        return Polynomial(self.field, self.cap, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.field, self.cap, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scaled(self, coeff) -> "Polynomial":
        c = self.field.element(coeff)
        if c.is_zero():
            return Polynomial.zero(self.field, self.cap)
        return Polynomial(self.field, self.cap, {m: t * c for m, t in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        acc: Dict[Monomial, FieldElement] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = cap_reduce_mono(mono_mul(ma, mb), self.cap)
                c = ca * cb
                if m in acc:
                    acc[m] = acc[m] + c
                else:
                    acc[m] = c
        return Polynomial(self.field, self.cap, {m: c for m, c in acc.items() if not c.is_zero()})

    def mul_variable(self, var: int) -> "Polynomial":
        """Multiply by a single variable, reducing under the cap."""
        acc: Dict[Monomial, FieldElement] = {}
        for m, c in self.terms.items():
            mm = cap_reduce_mono(mono_mul(m, ((var, 1),)), self.cap)
            if mm in acc:
                s = acc[mm] + c
                if s.is_zero():
                    del acc[mm]
                else:
                    acc[mm] = s
            else:
                acc[mm] = c
        return Polynomial(self.field, self.cap, acc)

    def power(self, e: int) -> "Polynomial":
        acc = Polynomial.one(self.field, self.cap)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        """Max monomial degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(mono_degree(m) for m in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def leading_monomial(self) -> Monomial:
        return max(self.terms, key=grlex_key)

    def variables(self) -> set:
        out = set()
        for m in self.terms:
            for v, _ in m:
                out.add(v)
        return out

    def coefficient(self, mono: Monomial) -> FieldElement:
        return self.terms.get(tuple(sorted(mono)), self.field.zero)

    def with_cap(self, cap: Optional[str]) -> "Polynomial":
        return Polynomial.from_terms(self.field, cap, self.terms.items())

    # -- substitution and evaluation ----------------------------------------

    def substitute(self, images: Mapping[int, "Polynomial"], target_cap: Optional[str]) -> "Polynomial":
        """Simultaneous substitution, then reduction under target_cap.

        Variables absent from the map stay themselves.
        """
        out = Polynomial.zero(self.field, target_cap)
        for m, c in self.terms.items():
            term = Polynomial.constant(self.field, target_cap, c)
            for v, e in m:
                if v in images:
                    img = images[v]
                    if img.field != self.field:
                        raise FieldMismatch("substitution image in a different field")
                    img = img if img.cap == target_cap else img.with_cap(target_cap)
                    term = term * img.power(e)
                else:
                    term = term * Polynomial.variable(self.field, target_cap, v, e)
            out = out + term
        return out

    def evaluate(self, assignment: Mapping[int, FieldElement]) -> FieldElement:
        total = self.field.zero
        for m, c in self.terms.items():
            v = c
            for var, e in m:
                if var not in assignment:
                    raise UnboundVariable(f"variable x_{var} unassigned")
                v = v * (assignment[var] ** e)
            total = total + v
        return total

    # -- equality and text format -------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.field == other.field
            and self.cap == other.cap
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.field, self.cap, frozenset((m, c.coeffs) for m, c in self.terms.items())))

    def __repr__(self):
        return poly_to_text(self)


# -- text format -------------------------------------------------------------
#
# One polynomial per line, terms joined by " + ", each term c*x_<id>^<e> with
# ^1 and a coefficient of 1 omissible.  Extension-field coefficients print as
# (c0,c1,...).


def _coeff_to_text(c: FieldElement) -> str:
    return repr(c)


def _coeff_from_text(tok: str, field: FieldSpec) -> FieldElement:
    if tok.startswith("("):
        return field.element(tuple(int(x) for x in tok.strip("()").split(",")))
    return field.element(int(tok))


def poly_to_text(poly: Polynomial) -> str:
    if not poly.terms:
        return "0"
    parts = []
    for m in sorted(poly.terms, key=grlex_key, reverse=True):
        c = poly.terms[m]
        factors = []
        for v, e in m:
            factors.append(f"x_{v}" + (f"^{e}" if e != 1 else ""))
        if not factors:
            parts.append(_coeff_to_text(c))
        elif c.is_one():
            parts.append("*".join(factors))
        else:
            parts.append(_coeff_to_text(c) + "*" + "*".join(factors))
    return " + ".join(parts)


def poly_from_text(line: str, field: FieldSpec, cap: Optional[str]) -> Polynomial:
    line = line.strip()
    if line == "0":
        return Polynomial.zero(field, cap)
    items = []
    for part in line.split(" + "):
        coeff = field.one
        mono = []
        for tok in part.split("*"):
            tok = tok.strip()
            if tok.startswith("x_"):
                body = tok[2:]
                if "^" in body:
                    var, e = body.split("^")
                    mono.append((int(var), int(e)))
                else:
                    mono.append((int(body), 1))
            else:
                coeff = coeff * _coeff_from_text(tok, field)
        items.append((tuple(mono), coeff))
    return Polynomial.from_terms(field, cap, items)


def cap_header(cap: Optional[str]) -> str:
    return f"cap {cap if cap is not None else 'free'}"


def cap_from_header(line: str) -> Optional[str]:
    tok = line.split()[1]
    if tok == "free":
        return None
    cap_kind(tok)  # validates
    return tok


def polys_to_text(polys, field: FieldSpec, cap: Optional[str]) -> str:
    lines = [field.header(), cap_header(cap)]
    lines.extend(poly_to_text(p) for p in polys)
    return "\n".join(lines) + "\n"


def polys_from_text(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    field = field_spec_from_header(lines[0])
    cap = cap_from_header(lines[1])
    return [poly_from_text(ln, field, cap) for ln in lines[2:]], field, cap
