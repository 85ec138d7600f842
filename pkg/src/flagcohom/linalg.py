"""Exact dense linear algebra over Q and F_p.

Matrices are lists of rows.  Over Q the rank is computed by fraction-free
(Bareiss) elimination on integer rows; over F_p by plain elimination on
residues.  ``nullspace`` and ``rref`` work with field scalars throughout.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm

from .field import Field, Fp


def _integer_rows(rows):
    out = []
    for row in rows:
        fr = [Fraction(x) for x in row]
        den = lcm(*(x.denominator for x in fr)) if fr else 1
        out.append([int(x * den) for x in fr])
    return out


def bareiss_rank(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    a = [list(r) for r in rows if any(r)]
    if not a:
        return 0
    m, n = len(a), len(a[0])
    rank, prev = 0, 1
    for col in range(n):
        piv = next((i for i in range(rank, m) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, m):
            f = a[i][col]
            row_i, row_r = a[i], a[rank]
            a[i] = [(p * row_i[j] - f * row_r[j]) // prev for j in range(n)]
        prev = p
        rank += 1
        if rank == m:
            break
    return rank


def _modp_rank(rows: list[list[int]], p: int) -> int:
    a = [[x % p for x in r] for r in rows]
    a = [r for r in a if any(r)]
    if not a:
        return 0
    m, n = len(a), len(a[0])
    rank = 0
    for col in range(n):
        piv = next((i for i in range(rank, m) if a[i][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][col], -1, p)
        row_r = [x * inv % p for x in a[rank]]
        a[rank] = row_r
        for i in range(rank + 1, m):
            f = a[i][col]
            if f:
                row_i = a[i]
                a[i] = [(row_i[j] - f * row_r[j]) % p for j in range(n)]
        rank += 1
        if rank == m:
            break
    return rank


def rank(rows, field: Field) -> int:
    """Exact rank of ``rows`` (list of equal-length rows) over ``field``."""
    if not rows or not rows[0]:
        return 0
    if field.is_rational:
        return bareiss_rank(_integer_rows(rows))
    p = field.p
    return _modp_rank([[x.v if isinstance(x, Fp) else int(field(x)) for x in r] for r in rows], p)


def rref(rows, field: Field):
    """Reduced row echelon form. Returns ``(rows, pivot_columns)``."""
    a = [[field(x) for x in r] for r in rows]
    if not a:
        return [], []
    m, n = len(a), len(a[0])
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if a[i][col]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][col]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    return a[:r], pivots


def nullspace(rows, field: Field, ncols: int | None = None):
    """Basis of {v : A v = 0}, one list of scalars per basis vector."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    red, pivots = rref(rows, field) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis
