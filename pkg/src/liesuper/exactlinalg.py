"""Exact linear algebra over the rationals.

Vectors here are sparse: dicts from an arbitrary (totally ordered) column
label to a nonzero Fraction.  This suits coefficient vectors of polynomial
vector fields, whose natural column labels are (component, monomial)
pairs discovered on the fly.  Dense helpers operate on lists of lists.

Everything is exact; no pivot-size heuristics are needed because Fraction
arithmetic cannot lose information.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

_ZERO = Fraction(0)

SparseVec = Mapping


class SparseEchelon:
    """Incremental row-echelon span of sparse rational vectors.

    ``add`` reduces a vector against the rows collected so far and keeps
    it (normalized) when a nonzero remainder survives.  Rows are keyed by
    their pivot column; every entry of a stored row sits at a column >=
    its pivot, so a single ascending elimination pass is complete.
    """

    def __init__(self):
        self._rows: dict = {}

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, vec: SparseVec) -> dict:
        rem = {k: Fraction(v) for k, v in vec.items() if v != 0}
        for pivot in sorted(self._rows):
            coef = rem.get(pivot)
            if not coef:
                continue
            for col, val in self._rows[pivot].items():
                nv = rem.get(col, _ZERO) - coef * val
                if nv:
                    rem[col] = nv
                else:
                    rem.pop(col, None)
        return rem

    def contains(self, vec: SparseVec) -> bool:
        return not self.reduce(vec)

    def add(self, vec: SparseVec) -> bool:
        """Insert ``vec``; True if it enlarged the span."""
        rem = self.reduce(vec)
        if not rem:
            return False
        pivot = min(rem)
        inv = 1 / rem[pivot]
        self._rows[pivot] = {k: v * inv for k, v in rem.items()}
        return True


def sparse_rank(vectors: Sequence[SparseVec]) -> int:
    ech = SparseEchelon()
    for v in vectors:
        ech.add(v)
    return ech.rank


def solve_in_span(vectors: Sequence[SparseVec], target: SparseVec) -> list[Fraction] | None:
    """Coefficients a with sum(a[i] * vectors[i]) == target, else None.

    The result is verified against every column exactly, so callers can
    trust a non-None answer even for overdetermined systems.  When the
    vectors are dependent one representative solution is returned.
    """
    cols = set(target)
    for v in vectors:
        cols.update(v)
    col_list = sorted(cols)
    n = len(vectors)
    # rows of the augmented system: one equation per column label
    rows = [
        [Fraction(vectors[i].get(c, 0)) for i in range(n)] + [Fraction(target.get(c, 0))]
        for c in col_list
    ]
    pivot_of_unknown: dict[int, int] = {}
    r = 0
    for j in range(n):
        pr = next((i for i in range(r, len(rows)) if rows[i][j] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][j]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][j] != 0:
                f = rows[i][j]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivot_of_unknown[j] = r
        r += 1
    coeffs = [_ZERO] * n
    for j, pr in pivot_of_unknown.items():
        coeffs[j] = rows[pr][n]
    # verify exactly
    for c in col_list:
        acc = _ZERO
        for i, a in enumerate(coeffs):
            if a:
                acc += a * Fraction(vectors[i].get(c, 0))
        if acc != Fraction(target.get(c, 0)):
            return None
    return coeffs


def dense_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    m = [list(map(Fraction, row)) for row in rows if any(v != 0 for v in row)]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        pr = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if pr is None:
            continue
        m[rank], m[pr] = m[pr], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [v * inv for v in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        if rank == min(len(m), ncols):
            break
    return rank


def nullspace_dimension(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    return ncols - dense_rank(rows)


def determinant(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(matrix)
    m = [list(map(Fraction, row)) for row in matrix]
    if any(len(row) != n for row in m):
        raise ValueError("determinant needs a square matrix")
    det = Fraction(1)
    for col in range(n):
        pr = next((i for i in range(col, n) if m[i][col] != 0), None)
        if pr is None:
            return _ZERO
        if pr != col:
            m[col], m[pr] = m[pr], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for i in range(col + 1, n):
            if m[i][col] != 0:
                f = m[i][col] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[col])]
    return det
