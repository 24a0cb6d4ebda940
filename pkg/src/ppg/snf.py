"""Exact integer matrix normal form (Smith form) with transform tracking.

Matrices are lists of lists of Python ints; everything is exact. Sizes stay
small (relation matrices of truncations, coefficient blocks of formulas), so
the classic pivoting reduction is plenty.
"""

from __future__ import annotations


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        for k in range(inner):
            c = ai[k]
            if c:
                bk = b[k]
                oi = out[i]
                for j in range(cols):
                    oi[j] += c * bk[j]
    return out


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def _add_row(m, src, dst, factor):
    # dst += factor * src
    srow, drow = m[src], m[dst]
    for j in range(len(drow)):
        drow[j] += factor * srow[j]


def _add_col(m, src, dst, factor):
    for row in m:
        row[dst] += factor * row[src]


def _negate_row(m, i):
    m[i] = [-v for v in m[i]]


def smith_normal_form(a: list[list[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return (d, u, v) with u*a*v = d, u and v unimodular, d diagonal.

    Diagonal entries are nonnegative and satisfy d[i] | d[i+1].
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    d = [list(row) for row in a]
    u = identity(rows)
    v = identity(cols)

    def find_pivot(s):
        best = None
        for i in range(s, rows):
            for j in range(s, cols):
                val = abs(d[i][j])
                if val and (best is None or val < best[0]):
                    best = (val, i, j)
        return best

    s = 0
    while s < min(rows, cols):
        pivot = find_pivot(s)
        if pivot is None:
            break
        _, pi, pj = pivot
        if pi != s:
            _swap_rows(d, s, pi)
            _swap_rows(u, s, pi)
        if pj != s:
            _swap_cols(d, s, pj)
            _swap_cols(v, s, pj)
        if d[s][s] < 0:
            _negate_row(d, s)
            _negate_row(u, s)

        clean = True
        for i in range(s + 1, rows):
            if d[i][s]:
                q = d[i][s] // d[s][s]
                _add_row(d, s, i, -q)
                _add_row(u, s, i, -q)
                if d[i][s]:
                    clean = False
        for j in range(s + 1, cols):
            if d[s][j]:
                q = d[s][j] // d[s][s]
                _add_col(d, s, j, -q)
                _add_col(v, s, j, -q)
                if d[s][j]:
                    clean = False
        if not clean:
            continue

        # pivot must divide the remaining block; if not, mix a bad row in
        bad = None
        for i in range(s + 1, rows):
            for j in range(s + 1, cols):
                if d[i][j] % d[s][s]:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            _add_row(d, bad, s, 1)
            _add_row(u, bad, s, 1)
            continue
        s += 1

    return d, u, v


def diagonal(d: list[list[int]]) -> list[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def solve_mod(a: list[list[int]], b: list[int], mod: int):
    """Solve a*x = b (mod mod). Returns (particular, kernel_basis) or None.

    kernel_basis spans the solution lattice of a*x = 0 (mod mod) together
    with the particular solution; entries are reduced mod `mod`.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    # solve over Z by augmenting with mod * identity columns
    aug = [list(a[i]) + [mod if j == i else 0 for j in range(rows)] for i in range(rows)]
    d, u, v = smith_normal_form(aug)
    ub = [sum(u[i][k] * b[k] for k in range(rows)) for i in range(rows)]
    diag = diagonal(d)
    y = [0] * (cols + rows)
    for i in range(rows):
        di = diag[i] if i < len(diag) else 0
        if di == 0:
            if ub[i] % mod:
                return None
        else:
            if ub[i] % di:
                return None
            y[i] = ub[i] // di
    rank = sum(1 for val in diag if val)
    x_full = [sum(v[i][k] * y[k] for k in range(len(y))) for i in range(cols + rows)]
    particular = [x % mod for x in x_full[:cols]]
    kernel = []
    for k in range(rank, cols + rows):
        vec = [v[i][k] % mod for i in range(cols)]
        if any(vec):
            kernel.append(vec)
    return particular, kernel
