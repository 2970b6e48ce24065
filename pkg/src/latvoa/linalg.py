"""Exact linear algebra over the rationals.

Rank uses fraction-free (Bareiss) elimination on integer matrices; kernels use
reduced row echelon form over ``Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Number = int | Fraction


def _row_to_ints(row: Sequence[Number]) -> list[int]:
    den = 1
    for x in row:
        if isinstance(x, Fraction) and x.denominator != 1:
            den = lcm(den, x.denominator)
    return [int(Fraction(x) * den) for x in row]


def integer_rows(matrix: Sequence[Sequence[Number]]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators (rank preserving)."""
    return [_row_to_ints(r) for r in matrix]


def rank(matrix: Sequence[Sequence[Number]]) -> int:
    """Exact rank via Bareiss fraction-free elimination with sparse rows."""
    rows = [r for r in integer_rows(matrix) if any(r)]
    if not rows:
        return 0
    ncols = len(rows[0])
    # sparse dict rows keep fill-in cheap for the structured Gram matrices
    srows = [{j: v for j, v in enumerate(r) if v} for r in rows]
    r = 0
    prev = 1
    for col in range(ncols):
        piv = None
        best = None
        for i in range(r, len(srows)):
            v = srows[i].get(col)
            if v:
                size = len(srows[i])
                if best is None or size < best:
                    piv, best = i, size
        if piv is None:
            continue
        srows[r], srows[piv] = srows[piv], srows[r]
        prow = srows[r]
        p = prow[col]
        for i in range(r + 1, len(srows)):
            row = srows[i]
            a = row.get(col)
            if a:
                new = {}
                for j in set(row) | set(prow):
                    if j == col:
                        continue
                    v = (p * row.get(j, 0) - a * prow.get(j, 0)) // prev
                    if v:
                        new[j] = v
                srows[i] = new
            elif p != prev:
                srows[i] = {j: (p * v) // prev for j, v in row.items()}
        prev = p
        r += 1
        srows = srows[:r] + [s for s in srows[r:] if s]
        if r == len(srows):
            break
    return r


def rref(matrix: Sequence[Sequence[Number]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[Fraction(x) for x in row] for row in matrix]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        pr = m[r]
        nz = [j for j in range(c, ncols) if pr[j] != 0]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                row = m[i]
                for j in nz:
                    row[j] -= f * pr[j]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(matrix: Sequence[Sequence[Number]], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : A x = 0}."""
    if not matrix:
        if ncols is None:
            raise ValueError("ncols needed for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ncols = len(matrix[0])
    red, pivots = rref(matrix)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def sparse_nullspace(rows: Sequence[dict[int, Number]], ncols: int) -> list[dict[int, Fraction]]:
    """Kernel basis for a sparse matrix given as column->value dicts."""
    m = [{j: Fraction(v) for j, v in r.items() if v} for r in rows]
    m = [r for r in m if r]
    pivots: dict[int, dict[int, Fraction]] = {}
    order: list[int] = []
    for row in m:
        row = dict(row)
        for pc in order:
            f = row.get(pc)
            if f:
                for j, v in pivots[pc].items():
                    nv = row.get(j, 0) - f * v
                    if nv:
                        row[j] = nv
                    else:
                        row.pop(j, None)
        if not row:
            continue
        pc = min(row)
        inv = 1 / row[pc]
        row = {j: v * inv for j, v in row.items()}
        for q in order:
            f = pivots[q].get(pc)
            if f:
                pr = pivots[q]
                for j, v in row.items():
                    nv = pr.get(j, 0) - f * v
                    if nv:
                        pr[j] = nv
                    else:
                        pr.pop(j, None)
        pivots[pc] = row
        order.append(pc)
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = {f: Fraction(1)}
        for pc, row in pivots.items():
            x = row.get(f)
            if x:
                v[pc] = -x
        basis.append(v)
    return basis


def solve_in_span(vectors: Sequence[Sequence[Number]], target: Sequence[Number]) -> list[Fraction] | None:
    """Coefficients expressing ``target`` in the span of ``vectors`` or None."""
    n = len(vectors)
    if n == 0:
        return [] if not any(target) else None
    cols = len(target)
    aug = [[Fraction(vectors[j][i]) for j in range(n)] + [Fraction(target[i])] for i in range(cols)]
    red, piv = rref(aug)
    if n in piv:
        return None
    sol = [Fraction(0)] * n
    for row, pc in zip(red, piv):
        sol[pc] = row[n]
    return sol


def determinant(matrix: Sequence[Sequence[Number]]) -> Fraction:
    m = [[Fraction(x) for x in row] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] * inv
            if f:
                for j in range(c, n):
                    m[i][j] -= f * m[c][j]
    return det


def inverse(matrix: Sequence[Sequence[Number]]) -> list[list[Fraction]]:
    n = len(matrix)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def hermite_rows(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form basis of the Z-span of integer rows."""
    m = [list(map(int, r)) for r in rows if any(r)]
    if not m:
        return []
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        # gcd-reduce column c among rows r..end
        while True:
            nz = [i for i in range(r, len(m)) if m[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(m[i][c]))
            m[r], m[piv] = m[piv], m[r]
            done = True
            for i in range(r + 1, len(m)):
                if m[i][c]:
                    q = m[i][c] // m[r][c]
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    if m[i][c]:
                        done = False
            if done:
                break
        if r < len(m) and m[r][c] != 0:
            if m[r][c] < 0:
                m[r] = [-a for a in m[r]]
            for i in range(r):
                q = m[i][c] // m[r][c]
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
            r += 1
            m = m[:r] + [row for row in m[r:] if any(row)]
    return m[:r]


def gcd_list(xs) -> int:
    g = 0
    for x in xs:
        g = gcd(g, int(x))
    return g
