"""Exact linear algebra over the rationals.

Matrices are lists of rows of Fraction.  Every elimination is exact, so
rank, kernel and membership answers are decisions, not approximations.
Pivot choice is always the first nonzero entry in column order, which makes
all outputs deterministic.
"""

from __future__ import annotations

from fractions import Fraction


class SingularMatrix(ValueError):
    pass


def frac_matrix(rows):
    return [[Fraction(x) for x in row] for row in rows]


def identity(n):
    return [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]


def matvec(m, v):
    return [sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in m]


def matmul(a, b):
    n, k, p = len(a), len(b), len(b[0]) if b else 0
    return [[sum((a[i][t] * b[t][j] for t in range(k)), Fraction(0)) for j in range(p)]
            for i in range(n)]


def rref(m):
    """Reduced row echelon form. Returns (rows, pivot_columns); m is not modified."""
    rows = [list(r) for r in m]
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        sel = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return rows, pivots


def rank(m):
    if not m or not m[0]:
        return 0
    return len(rref(m)[1])


def nullspace(m):
    """Deterministic basis of {x : m x = 0}.

    One basis vector per free column, taken in increasing column order; the
    vector carries 1 in its own free column and 0 in the other free columns.
    """
    if not m:
        return []
    n_cols = len(m[0])
    rows, pivots = rref(m)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n_cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][fc]
        basis.append(v)
    return basis


def inverse(m):
    n = len(m)
    aug = [list(row) + ident_row for row, ident_row in zip(m, identity(n))]
    rows, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrix("matrix is not invertible")
    return [row[n:] for row in rows]


class Echelon:
    """Incremental row space in reduced echelon form, for membership tests
    and reduction modulo a growing subspace."""

    def __init__(self):
        self.rows = {}  # pivot column -> normalized row

    def reduce(self, v):
        v = list(v)
        for c, row in sorted(self.rows.items()):
            if v[c] != 0:
                f = v[c]
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def insert(self, v):
        """Reduce v against the space; insert the remainder if nonzero.
        Returns the reduced vector, or None if v was already in the space."""
        v = self.reduce(v)
        pivot = next((c for c, x in enumerate(v) if x != 0), None)
        if pivot is None:
            return None
        inv = Fraction(1) / v[pivot]
        v = [x * inv for x in v]
        for c, row in self.rows.items():
            if row[pivot] != 0:
                f = row[pivot]
                self.rows[c] = [x - f * y for x, y in zip(row, v)]
        self.rows[pivot] = v
        return v

    def contains(self, v):
        return all(x == 0 for x in self.reduce(v))

    def __len__(self):
        return len(self.rows)
