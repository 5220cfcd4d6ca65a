"""Exact linear algebra over finite fields.

Two code paths: a dense numpy path for prime fields (with a packed-bit
Gauss-Jordan for GF(2), by far the most used case) and a sparse dict path
for extension fields, whose systems stay small.  Everything is exact; there
is no floating point anywhere.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .fields import FieldElement, FieldSpec


def solve_linear(rows: Sequence[Dict[int, FieldElement]], n_cols: int,
                 rhs: Sequence[FieldElement], field: FieldSpec) -> Optional[List[FieldElement]]:
    """Solve A x = b given sparse rows; returns one solution (free variables
    zero) or None when inconsistent.  Dispatches on the field."""
    if field.m == 1:
        int_rows = [{c: v.coeffs[0] for c, v in row.items()} for row in rows]
        int_rhs = [v.coeffs[0] for v in rhs]
        if field.p == 2:
            sol = _solve_gf2(int_rows, n_cols, int_rhs)
        else:
            sol = _solve_prime(int_rows, n_cols, int_rhs, field.p)
        if sol is None:
            return None
        return [field.element(int(x)) for x in sol]
    return _solve_generic(rows, n_cols, rhs, field)


def _solve_gf2(rows, n_cols, rhs) -> Optional[np.ndarray]:
    n_rows = len(rows)
    words = (n_cols + 1 + 63) // 64  # last logical column holds b
    m = np.zeros((n_rows, words), dtype=np.uint64)
    for r, row in enumerate(rows):
        for c, v in row.items():
            if v & 1:
                m[r, c >> 6] ^= np.uint64(1 << (c & 63))
        if rhs[r] & 1:
            c = n_cols
            m[r, c >> 6] ^= np.uint64(1 << (c & 63))
    pivot_of_col: Dict[int, int] = {}
    rank = 0
    for r in range(n_rows):
        lead = _gf2_leading(m[r])
        while lead is not None and lead in pivot_of_col:
            m[r] ^= m[pivot_of_col[lead]]
            lead = _gf2_leading(m[r])
        if lead is None:
            continue
        if lead == n_cols:
            return None  # 0 = 1
        # eliminate this column everywhere else
        w, b = lead >> 6, lead & 63
        mask = (m[:, w] >> np.uint64(b)) & np.uint64(1)
        mask[r] = 0
        hits = np.nonzero(mask)[0]
        if len(hits):
            m[hits] ^= m[r]
        pivot_of_col[lead] = r
        rank += 1
    x = np.zeros(n_cols, dtype=np.int64)
    bw, bb = n_cols >> 6, n_cols & 63
    for col, r in pivot_of_col.items():
        if (int(m[r, bw]) >> bb) & 1:
            x[col] = 1
    return x


def _gf2_leading(row: np.ndarray) -> Optional[int]:
    nz = np.nonzero(row)[0]
    if not len(nz):
        return None
    w = int(nz[0])
    word = int(row[w])
    return (w << 6) + ((word & -word).bit_length() - 1)


def _solve_prime(rows, n_cols, rhs, p) -> Optional[np.ndarray]:
    n_rows = len(rows)
    m = np.zeros((n_rows, n_cols + 1), dtype=np.int64)
    for r, row in enumerate(rows):
        for c, v in row.items():
            m[r, c] = v % p
        m[r, n_cols] = rhs[r] % p
    pivot_of_col: Dict[int, int] = {}
    for r in range(n_rows):
        # reduce against existing pivots
        for col, pr in pivot_of_col.items():
            f = int(m[r, col])
            if f:
                m[r] = (m[r] - f * m[pr]) % p
        nz = np.nonzero(m[r])[0]
        if not len(nz):
            continue
        lead = int(nz[0])
        if lead == n_cols:
            return None
        inv = pow(int(m[r, lead]), p - 2, p)
        m[r] = (m[r] * inv) % p
        col_vals = m[:, lead].copy()
        col_vals[r] = 0
        hits = np.nonzero(col_vals)[0]
        if len(hits):
            m[hits] = (m[hits] - np.outer(col_vals[hits], m[r])) % p
        pivot_of_col[lead] = r
    x = np.zeros(n_cols, dtype=np.int64)
    for col, r in pivot_of_col.items():
        x[col] = int(m[r, n_cols])
    return x


def _solve_generic(rows, n_cols, rhs, field) -> Optional[List[FieldElement]]:
    work: List[Dict[int, FieldElement]] = []
    for row, b in zip(rows, rhs):
        d = {c: v for c, v in row.items() if not v.is_zero()}
        if not b.is_zero():
            d[n_cols] = b
        work.append(d)
    pivots: Dict[int, Dict[int, FieldElement]] = {}
    for d in work:
        d = dict(d)
        for col in sorted(pivots):
            if col in d:
                f = d[col]
                for c, v in pivots[col].items():
                    nv = d.get(c, field.zero) - f * v
                    if nv.is_zero():
                        d.pop(c, None)
                    else:
                        d[c] = nv
        if not d:
            continue
        lead = min(d)
        if lead == n_cols:
            return None
        inv = d[lead].inverse()
        d = {c: v * inv for c, v in d.items()}
        for col, prow in pivots.items():
            if lead in prow:
                f = prow[lead]
                for c, v in d.items():
                    nv = prow.get(c, field.zero) - f * v
                    if nv.is_zero():
                        prow.pop(c, None)
                    else:
                        prow[c] = nv
        pivots[lead] = d
    x = [field.zero] * n_cols
    for col, prow in pivots.items():
        x[col] = prow.get(n_cols, field.zero)
    return x
