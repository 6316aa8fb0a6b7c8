"""Integral homology of simplicial complexes via Smith normal form.

With ``O_k`` the number of k-simplices and ``t_k`` the rank of the boundary
map ``d_k : C_k -> C_{k-1}`` (``t_0 = 0``), the Betti numbers are
``b_k = O_k - t_k - t_{k+1}`` and the torsion coefficients of ``H_k`` are the
invariant factors of ``d_{k+1}`` that exceed one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError


@dataclass
class BoundaryMatrix:
    """Sparse integer matrix stored by columns (``{row: value}`` dicts)."""

    rows: int
    cols: int
    columns: list
    k: int = 0

    def to_dense(self):
        out = np.zeros((self.rows, self.cols), dtype=np.int64)
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                out[i, j] = v
        return out

    @classmethod
    def from_dense(cls, A, k=0):
        A = [[int(v) for v in row] for row in A]
        rows = len(A)
        cols = len(A[0]) if rows else 0
        columns = [{i: A[i][j] for i in range(rows) if A[i][j]} for j in range(cols)]
        return cls(rows, cols, columns, k)


def boundary_matrix(complex_, k: int) -> BoundaryMatrix:
    """Matrix of ``d_k``; deleting vertex ``j`` (0-based) carries sign ``(-1)**j``."""
    sims = complex_.simplices
    if not 1 <= k < len(sims):
        raise InvalidInputError(f"boundary map d_{k} needs 1 <= k <= {len(sims) - 1}")
    index = {s: i for i, s in enumerate(sims[k - 1])}
    columns = []
    for s in sims[k]:
        col = {}
        for j in range(len(s)):
            face = s[:j] + s[j + 1:]
            try:
                col[index[face]] = -1 if j % 2 else 1
            except KeyError:
                raise InvalidInputError(f"facet {list(face)} of {list(s)} is not in the complex") from None
        columns.append(col)
    return BoundaryMatrix(len(sims[k - 1]), len(sims[k]), columns, k)


@dataclass
class SmithForm:
    diagonal: list  # nonzero invariant factors, d_1 | d_2 | ...

    @property
    def rank(self) -> int:
        return len(self.diagonal)


def _dense_snf(A):
    """Invariant factors of a dense list-of-lists integer matrix (consumed)."""
    diag = []
    while A and A[0]:
        best = None
        for i, row in enumerate(A):
            for j, v in enumerate(row):
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, i, j = best
        A[0], A[i] = A[i], A[0]
        for row in A:
            row[0], row[j] = row[j], row[0]
        while True:
            p = A[0][0]
            for row in A[1:]:
                if row[0]:
                    q = row[0] // p
                    top = A[0]
                    for c in range(len(row)):
                        if top[c]:
                            row[c] -= q * top[c]
            for c in range(1, len(A[0])):
                if A[0][c]:
                    q = A[0][c] // p
                    for row in A:
                        if row[0]:
                            row[c] -= q * row[0]
            # remainders are smaller than |p|; move the smallest to the pivot
            best = None
            for i in range(1, len(A)):
                v = A[i][0]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, "row")
            for c in range(1, len(A[0])):
                v = A[0][c]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), c, "col")
            if best is not None:
                _, idx, kind = best
                if kind == "row":
                    A[0], A[idx] = A[idx], A[0]
                else:
                    for row in A:
                        row[0], row[idx] = row[idx], row[0]
                continue
            # pivot must divide the trailing block; otherwise fold a row in
            bad = next((i for i in range(1, len(A)) if any(v % p for v in A[i][1:])), None)
            if bad is None:
                break
            A[0] = [a + b for a, b in zip(A[0], A[bad])]
        diag.append(abs(A[0][0]))
        A = [row[1:] for row in A[1:]]
    return diag


def _sparse_unit_elimination(columns):
    """Eliminate +-1 pivots from a sparse column matrix.

    Each pivot is cleared from its row by column operations, then the pivot
    row and column are dropped; the matrix is unimodularly equivalent to
    ``diag(1, ..., 1)`` plus the remaining block.  Rows with a single entry
    are taken first since they cause no fill-in (for a boundary matrix these
    are free faces); otherwise the shortest column and its sparsest unit row
    are used.  Returns ``(unit_count, remaining columns)``.
    """
    cols = {j: dict(c) for j, c in enumerate(columns) if c}
    rows: dict = {}
    for j, c in cols.items():
        for i in c:
            rows.setdefault(i, set()).add(j)
    singles = sorted((i for i, r in rows.items() if len(r) == 1), reverse=True)

    def eliminate(pj, pi):
        pcol = cols.pop(pj)
        pv = pcol[pi]
        for i in pcol:
            rows[i].discard(pj)
        for j in sorted(rows[pi]):
            c = cols[j]
            q = c[pi] * pv  # equals c[pi] / pv for pv = +-1
            for i, v in pcol.items():
                nv = c.get(i, 0) - q * v
                if nv:
                    if i not in c:
                        rows[i].add(j)
                    c[i] = nv
                elif i in c:
                    del c[i]
                    rows[i].discard(j)
            if not c:
                del cols[j]
        del rows[pi]
        for i in sorted(pcol, reverse=True):
            if i != pi and len(rows[i]) == 1:
                singles.append(i)

    def drain():
        done = 0
        while singles:
            i = singles.pop()
            r = rows.get(i)
            if r is None or len(r) != 1:
                continue
            (j,) = r
            if cols[j][i] in (1, -1):
                eliminate(j, i)
                done += 1
        return done

    units = drain()
    progress = True
    while progress:
        progress = False
        for pj in sorted(cols, key=lambda j: (len(cols[j]), j)):
            pcol = cols.get(pj)
            if not pcol:
                continue
            cand = [(len(rows[i]), i) for i, v in pcol.items() if v == 1 or v == -1]
            if not cand:
                continue
            eliminate(pj, min(cand)[1])
            units += 1 + drain()
            progress = True
    return units, list(cols.values())


def smith_normal_form(matrix) -> SmithForm:
    """Invariant factors of an integer matrix (dense array or ``BoundaryMatrix``)."""
    if isinstance(matrix, BoundaryMatrix):
        columns = matrix.columns
    else:
        columns = BoundaryMatrix.from_dense(matrix).columns
    units, rest = _sparse_unit_elimination(columns)
    diag = [1] * units
    if rest:
        row_ids = sorted({i for c in rest for i in c})
        pos = {i: r for r, i in enumerate(row_ids)}
        A = [[0] * len(rest) for _ in row_ids]
        for j, c in enumerate(rest):
            for i, v in c.items():
                A[pos[i]][j] = int(v)
        diag += _dense_snf(A)
    diag.sort()
    return SmithForm(diag)


def rational_rank(matrix) -> int:
    """Rank over the rationals by exact Gaussian elimination."""
    if isinstance(matrix, BoundaryMatrix):
        matrix = matrix.to_dense()
    A = [[Fraction(int(v)) for v in row] for row in matrix]
    rank = 0
    rows = len(A)
    cols = len(A[0]) if rows else 0
    for j in range(cols):
        piv = next((i for i in range(rank, rows) if A[i][j] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for i in range(rank + 1, rows):
            if A[i][j]:
                f = A[i][j] / A[rank][j]
                A[i] = [a - f * b for a, b in zip(A[i], A[rank])]
        rank += 1
    return rank


@dataclass
class HomologyResult:
    betti: list
    torsion: list
    counts: list = field(default_factory=list)
    ranks: list = field(default_factory=list)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * b for k, b in enumerate(self.betti))


def homology_from_complex(complex_, q_top: int | None = None) -> HomologyResult:
    """Betti numbers and torsion for dimensions ``0..q_top`` (default ``q_max - 1``)."""
    q_max = len(complex_.simplices) - 1
    if q_top is None:
        q_top = q_max - 1
    if q_top < 0:
        raise InvalidInputError("complex must carry simplices one dimension above q_top")
    if q_top + 1 > q_max:
        raise InvalidInputError(
            f"q_top={q_top} needs boundary data up to dimension {q_top + 1}, complex has {q_max}")
    counts = [len(complex_.simplices[k]) for k in range(q_top + 2)]
    ranks = [0]
    factors = [[]]
    for k in range(1, q_top + 2):
        snf = smith_normal_form(boundary_matrix(complex_, k))
        ranks.append(snf.rank)
        factors.append([d for d in snf.diagonal if d > 1])
    betti = [counts[k] - ranks[k] - ranks[k + 1] for k in range(q_top + 1)]
    torsion = [factors[k + 1] for k in range(q_top + 1)]
    return HomologyResult(betti, torsion, counts, ranks)


def gcd_chain_ok(diagonal) -> bool:
    return all(b % a == 0 for a, b in zip(diagonal, diagonal[1:])) and all(d > 0 for d in diagonal)


__all__ = [
    "BoundaryMatrix", "SmithForm", "HomologyResult", "boundary_matrix", "smith_normal_form",
    "rational_rank", "homology_from_complex", "gcd_chain_ok",
]
