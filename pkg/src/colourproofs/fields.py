"""Exact arithmetic in GF(p) and extensions GF(p^m).

Elements are coefficient vectors over a monic irreducible modulus (the
identity polynomial z when m = 1).  A FieldSpec may additionally carry a
verified primitive k-th root of unity, which is what the roots-of-unity
colouring encoding needs.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .errors import CharDividesK, FieldMismatch, PrimeTooLarge

PRIME_LIMB_BOUND = 2**61


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin; these witnesses cover n < 3.3e24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# -- polynomial helpers over GF(p), coefficients least-significant first --


def _trim(c: list) -> tuple:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _poly_mod(a, mod, p):
    a = list(a)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        if a[-1] == 0:
            a.pop()
            continue
        factor = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(mod):
            a[shift + i] = (a[shift + i] - factor * mi) % p
        a.pop()
    return _trim(a)


def _poly_divmod(a, b, p):
    a = list(a)
    q = [0] * max(0, len(a) - len(b) + 1)
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b) and a:
        if a[-1] == 0:
            a.pop()
            continue
        factor = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        q[shift] = factor
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * bi) % p
        a.pop()
    return _trim(q), _trim(a)


def _poly_xgcd(a, b, p):
    # returns (g, s, t) with s*a + t*b = g over GF(p)[z]
    r0, r1 = a, b
    s0, s1 = (1,), ()
    t0, t1 = (), (1,)
    while r1:
        q, r = _poly_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _trim([(x - y) % p for x, y in _zip_sub(s0, _poly_mul(q, s1, p), p)])
        t0, t1 = t1, _trim([(x - y) % p for x, y in _zip_sub(t0, _poly_mul(q, t1, p), p)])
    return r0, s0, t0


def _zip_sub(a, b, p):
    n = max(len(a), len(b))
    for i in range(n):
        yield (a[i] if i < len(a) else 0), (b[i] if i < len(b) else 0)


def _is_irreducible(mod, p):
    # trial division by every monic polynomial of degree 1 .. deg/2
    deg = len(mod) - 1
    if deg <= 1:
        return True
    if mod[0] == 0:  # root at zero
        return False
    for d in range(1, deg // 2 + 1):
        for code in range(p**d):
            cand = []
            c = code
            for _ in range(d):
                cand.append(c % p)
                c //= p
            cand.append(1)
            _, r = _poly_divmod(mod, tuple(cand), p)
            if not r:
                return False
    return True


def _find_irreducible(p: int, m: int) -> tuple:
    # ascending search over the non-leading coefficients, base-p encoded
    if m == 1:
        return (0, 1)  # the polynomial z; elements are plain residues
    for code in range(p**m):
        coeffs = []
        c = code
        for _ in range(m):
            coeffs.append(c % p)
            c //= p
        coeffs.append(1)
        if _is_irreducible(tuple(coeffs), p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")  # unreachable


class FieldElement:
    """Immutable element of a FieldSpec, stored as m residues (LSC first)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: "FieldSpec", coeffs: Iterable[int]):
        self.field = field
        c = tuple(x % field.p for x in coeffs)
        if len(c) != field.m:
            c = tuple(list(c) + [0] * (field.m - len(c)))[: field.m]
        self.coeffs = c

    def _check(self, other):
        if not isinstance(other, FieldElement) or other.field != self.field:
            raise FieldMismatch(f"cannot combine elements of {self.field} and {getattr(other, 'field', other)}")

    def __add__(self, other):
        self._check(other)
        p = self.field.p
        return FieldElement(self.field, [(a + b) % p for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        p = self.field.p
        return FieldElement(self.field, [(a - b) % p for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, [(-a) % p for a in self.coeffs])

    def __mul__(self, other):
        self._check(other)
        f = self.field
        prod = _poly_mul(self.coeffs, other.coeffs, f.p)
        return FieldElement(f, _poly_mod(prod, f.modulus, f.p) if f.m > 1 else prod)

    def inverse(self) -> "FieldElement":
        f = self.field
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if f.m == 1:
            return FieldElement(f, (pow(self.coeffs[0], f.p - 2, f.p),))
        g, s, _ = _poly_xgcd(_trim(list(self.coeffs)), f.modulus, f.p)
        # g is a nonzero constant; normalise
        ginv = pow(g[0], f.p - 2, f.p)
        return FieldElement(f, _poly_mul(s, (ginv,), f.p))

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        acc = self.field.one
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def to_int(self) -> int:
        # base-p encoding, least-significant coefficient first
        v = 0
        for c in reversed(self.coeffs):
            v = v * self.field.p + c
        return v

    def __eq__(self, other):
        return (
            isinstance(other, FieldElement)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field.p, self.field.modulus, self.coeffs))

    def __repr__(self):
        if self.field.m == 1:
            return str(self.coeffs[0])
        return "(" + ",".join(str(c) for c in self.coeffs) + ")"


class FieldSpec:
    """GF(p^m) with an explicit monic irreducible modulus.

    Optionally carries (kth_root, k) where kth_root is a verified primitive
    k-th root of unity.
    """

    __slots__ = ("p", "m", "modulus", "kth_root", "k")

    def __init__(self, p: int, m: int = 1, modulus: Optional[tuple] = None,
                 kth_root: Optional[tuple] = None, k: Optional[int] = None):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p >= PRIME_LIMB_BOUND:
            raise PrimeTooLarge(f"characteristic {p} exceeds 2^61")
        if m < 1:
            raise ValueError("extension degree must be >= 1")
        self.p = p
        self.m = m
        if modulus is None:
            modulus = _find_irreducible(p, m)
        modulus = tuple(c % p for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree m")
        if not _is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is reducible over GF({p})")
        self.modulus = modulus
        if (kth_root is None) != (k is None):
            raise ValueError("kth_root and k must be supplied together")
        self.kth_root = None
        self.k = k
        if kth_root is not None:
            if k < 2:
                raise ValueError("k must be >= 2")
            if k % p == 0:
                raise CharDividesK(f"characteristic {p} divides k={k}")
            w = FieldElement(self, kth_root)
            if not (w**k).is_one():
                raise ValueError("claimed root does not satisfy w^k = 1")
            for j in range(1, k):
                if (w**j).is_one():
                    raise ValueError("claimed root is not primitive")
            self.kth_root = w

    @property
    def order(self) -> int:
        return self.p**self.m

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, (0,) * self.m)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, (1,) + (0,) * (self.m - 1))

    def element(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatch("element belongs to another field")
            return value
        if isinstance(value, int):
            return self.from_int(value % self.order)
        return FieldElement(self, value)

    def from_int(self, v: int) -> FieldElement:
        coeffs = []
        for _ in range(self.m):
            coeffs.append(v % self.p)
            v //= self.p
        return FieldElement(self, coeffs)

    def elements(self):
        """All field elements in ascending base-p integer order."""
        for v in range(self.order):
            yield self.from_int(v)

    def __eq__(self, other):
        return (
            isinstance(other, FieldSpec)
            and self.p == other.p
            and self.m == other.m
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m})"

    def header(self) -> str:
        return f"field p={self.p} m={self.m} modulus={','.join(str(c) for c in self.modulus)}"


def field_spec_from_header(line: str) -> FieldSpec:
    parts = dict(tok.split("=", 1) for tok in line.split()[1:])
    p = int(parts["p"])
    m = int(parts["m"])
    modulus = tuple(int(c) for c in parts["modulus"].split(","))
    return FieldSpec(p, m, modulus)


def attach_kth_root(spec: FieldSpec, k: int) -> FieldSpec:
    """The same field with its first primitive k-th root attached; fails if
    the multiplicative group has no element of order k."""
    if spec.kth_root is not None and spec.k == k:
        return spec
    if (spec.order - 1) % k != 0:
        raise ValueError(f"{spec} holds no primitive {k}-th root of unity")
    for w in spec.elements():
        if w.is_zero() or not (w**k).is_one():
            continue
        if any((w**j).is_one() for j in range(1, k)):
            continue
        return FieldSpec(spec.p, spec.m, spec.modulus, kth_root=w.coeffs, k=k)
    raise AssertionError("no primitive root found despite k | order - 1")


def field_with_kth_root(p: int, k: int) -> FieldSpec:
    """Smallest extension GF(p^m) holding a primitive k-th root of unity.

    m is the least integer with k | p^m - 1, and the returned root is the
    first qualifying element in ascending base-p integer order.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p >= PRIME_LIMB_BOUND:
        raise PrimeTooLarge(f"characteristic {p} exceeds 2^61")
    if k < 2:
        raise ValueError("k must be >= 2")
    if k % p == 0:
        raise CharDividesK(f"characteristic {p} divides k={k}")
    m = 1
    while (p**m - 1) % k != 0:
        m += 1
    spec = FieldSpec(p, m)
    for w in spec.elements():
        if w.is_zero():
            continue
        if not (w**k).is_one():
            continue
        if any((w**j).is_one() for j in range(1, k)):
            continue
        return FieldSpec(p, m, spec.modulus, kth_root=w.coeffs, k=k)
    raise AssertionError("no primitive root found despite k | p^m - 1")  # unreachable
