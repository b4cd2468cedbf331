"""Exact sparse linear algebra over the rationals.

Matrices are lists of row dictionaries ``{column: value}`` with ``int`` or
``Fraction`` entries.  Rank is computed by fraction-free elimination: rows
are scaled to primitive integer vectors and combined with integer
multipliers, so nothing is ever divided except by row contents.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable


class SparseMatrix:
    """An ``nrows x ncols`` matrix stored row-wise."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: list[dict[int, object]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else [{} for _ in range(nrows)]
        if len(self.rows) != nrows:
            raise ValueError("row count mismatch")

    @classmethod
    def from_entries(cls, nrows: int, ncols: int,
                     entries: Iterable[tuple[int, int, object]]) -> "SparseMatrix":
        m = cls(nrows, ncols)
        for i, j, v in entries:
            m.add(i, j, v)
        return m

    @classmethod
    def from_dense(cls, dense: list[list]) -> "SparseMatrix":
        ncols = len(dense[0]) if dense else 0
        return cls(len(dense), ncols, [{j: v for j, v in enumerate(r) if v} for r in dense])

    def add(self, i: int, j: int, v) -> None:
        if not v:
            return
        row = self.rows[i]
        nv = row.get(j, 0) + v
        if nv:
            row[j] = nv
        else:
            row.pop(j, None)

    def get(self, i: int, j: int):
        return self.rows[i].get(j, 0)

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def is_zero(self) -> bool:
        return all(not r for r in self.rows)

    def transpose(self) -> "SparseMatrix":
        t = SparseMatrix(self.ncols, self.nrows)
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                t.rows[j][i] = v
        return t

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}")
        out = SparseMatrix(self.nrows, other.ncols)
        for i, r in enumerate(self.rows):
            acc: dict[int, object] = {}
            for k, v in r.items():
                for j, w in other.rows[k].items():
                    acc[j] = acc.get(j, 0) + v * w
            out.rows[i] = {j: v for j, v in acc.items() if v}
        return out

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        out = SparseMatrix(self.nrows, self.ncols, [dict(r) for r in self.rows])
        for i, r in enumerate(other.rows):
            for j, v in r.items():
                out.add(i, j, -v)
        return out

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.nrows == other.nrows
                and self.ncols == other.ncols and self.rows == other.rows)

    def to_dense(self) -> list[list]:
        return [[r.get(j, 0) for j in range(self.ncols)] for r in self.rows]

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def _primitive(row: dict[int, object]) -> dict[int, int]:
    """Scale a rational row to a primitive integer row with positive leading entry."""
    if not row:
        return {}
    vals = list(row.values())
    if any(isinstance(v, Fraction) for v in vals):
        den = 1
        for v in vals:
            den = lcm(den, Fraction(v).denominator)
        row = {k: int(Fraction(v) * den) for k, v in row.items()}
        vals = list(row.values())
    g = 0
    for v in vals:
        g = gcd(g, v)
        if g == 1:
            break
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g != 1:
        row = {k: v // g for k, v in row.items()}
    return row


def rank(m: SparseMatrix | list[dict[int, object]]) -> int:
    """Exact rank over Q."""
    rows = m.rows if isinstance(m, SparseMatrix) else m
    pivots: dict[int, dict[int, int]] = {}
    for raw in rows:
        row = _primitive({k: v for k, v in raw.items() if v})
        while row:
            c = min(row)
            p = pivots.get(c)
            if p is None:
                pivots[c] = row
                break
            a, b = p[c], row[c]
            g = gcd(a, b)
            a //= g
            b //= g
            new = {k: a * v for k, v in row.items()} if a != 1 else dict(row)
            for k, v in p.items():
                nv = new.get(k, 0) - b * v
                if nv:
                    new[k] = nv
                else:
                    new.pop(k, None)
            row = _primitive(new)
    return len(pivots)


def rank_with_transpose_choice(m: SparseMatrix) -> int:
    """Rank, eliminating along the shorter dimension."""
    if m.nrows > m.ncols:
        return rank(m.transpose())
    return rank(m)
