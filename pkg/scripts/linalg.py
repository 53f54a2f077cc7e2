#!/usr/bin/env python3
"""
Exact Rational Linear Algebra

Row reduction, nullspaces and particular solutions for the coefficient systems
produced by ideal membership and PDE derivation. Rows are stored sparsely and
eliminated over the integers (fraction-free cross multiplication followed by
content division); the result is normalized to the unique reduced row-echelon
form over Fraction, so pivots and free columns never depend on row order.
"""

from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Row = Dict[int, Fraction]


class RationalMatrix:
    """Rectangular matrix of Fractions, stored as one {column: value} dict per row."""

    def __init__(self, n_rows: int, n_cols: int, rows: Optional[List[Row]] = None):
        self.n_rows = n_rows
        self.n_cols = n_cols
        if rows is None:
            rows = [{} for _ in range(n_rows)]
        if len(rows) != n_rows:
            raise ValueError(f"expected {n_rows} rows, got {len(rows)}")
        self.rows: List[Row] = []
        for row in rows:
            clean = {}
            for j, v in row.items():
                if not 0 <= j < n_cols:
                    raise IndexError(f"column {j} outside 0..{n_cols - 1}")
                v = Fraction(v)
                if v:
                    clean[j] = v
            self.rows.append(clean)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], n_cols: Optional[int] = None):
        if n_cols is None:
            n_cols = len(rows[0]) if rows else 0
        sparse = []
        for row in rows:
            if len(row) != n_cols:
                raise ValueError("ragged rows")
            sparse.append({j: v for j, v in enumerate(row) if v})
        return cls(len(rows), n_cols, sparse)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, [{i: Fraction(1)} for i in range(n)])

    def to_rows(self) -> List[List[Fraction]]:
        return [
            [row.get(j, Fraction(0)) for j in range(self.n_cols)] for row in self.rows
        ]

    def entry(self, i: int, j: int) -> Fraction:
        return self.rows[i].get(j, Fraction(0))

    def matvec(self, x: Sequence) -> List[Fraction]:
        if len(x) != self.n_cols:
            raise ValueError("dimension mismatch")
        return [sum((v * x[j] for j, v in row.items()), Fraction(0)) for row in self.rows]

    def augmented(self, b: Sequence) -> "RationalMatrix":
        if len(b) != self.n_rows:
            raise ValueError("dimension mismatch")
        rows = []
        for row, value in zip(self.rows, b):
            new = dict(row)
            if value:
                new[self.n_cols] = Fraction(value)
            rows.append(new)
        return RationalMatrix(self.n_rows, self.n_cols + 1, rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return (self.n_rows, self.n_cols, self.rows) == (
            other.n_rows,
            other.n_cols,
            other.rows,
        )

    def __repr__(self) -> str:
        return f"RationalMatrix({self.n_rows}x{self.n_cols})"


def _integer_row(row: Row) -> Dict[int, int]:
    lcm = 1
    for v in row.values():
        lcm = lcm * v.denominator // gcd(lcm, v.denominator)
    ints = {j: int(v * lcm) for j, v in row.items()}
    return _primitive(ints)


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {j: v // g for j, v in row.items()}
    return row


def rref(m: RationalMatrix) -> Tuple[RationalMatrix, List[int]]:
    """Reduced row-echelon form and pivot columns.

    Pivot choice: leftmost column first, then the smallest row index holding a
    nonzero entry there.
    """
    rows = [_integer_row(r) for r in m.rows]
    by_col: Dict[int, set] = {}
    for i, row in enumerate(rows):
        for j in row:
            by_col.setdefault(j, set()).add(i)

    used = set()
    pivots: List[int] = []
    pivot_rows: List[int] = []
    for col in range(m.n_cols):
        holders = by_col.get(col)
        if not holders:
            continue
        candidates = [i for i in holders if i not in used]
        if not candidates:
            continue
        p = min(candidates)
        used.add(p)
        prow = rows[p]
        pv = prow[col]
        for i in sorted(holders):
            if i == p:
                continue
            row = rows[i]
            c = row[col]
            new = {j: pv * v for j, v in row.items()}
            for j, v in prow.items():
                new[j] = new.get(j, 0) - c * v
            new = _primitive({j: v for j, v in new.items() if v})
            for j in row:
                if j not in new:
                    by_col[j].discard(i)
            for j in new:
                if j not in row:
                    by_col.setdefault(j, set()).add(i)
            rows[i] = new
        pivots.append(col)
        pivot_rows.append(p)

    out: List[Row] = []
    for col, p in zip(pivots, pivot_rows):
        pv = rows[p][col]
        out.append({j: Fraction(v, pv) for j, v in rows[p].items()})
    out.extend({} for _ in range(m.n_rows - len(out)))
    return RationalMatrix(m.n_rows, m.n_cols, out), pivots


def rank(m: RationalMatrix) -> int:
    return len(rref(m)[1])


def nullspace(m: RationalMatrix) -> List[List[Fraction]]:
    """One kernel vector per free column, with a 1 in that column."""
    reduced, pivots = rref(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.n_cols):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * m.n_cols
        vec[free] = Fraction(1)
        for row, pc in zip(reduced.rows, pivots):
            v = row.get(free)
            if v:
                vec[pc] = -v
        basis.append(vec)
    return basis


def solve(a: RationalMatrix, b: Iterable) -> Optional[List[Fraction]]:
    """A solution of a·x = b with free variables set to 0, or None if inconsistent."""
    reduced, pivots = rref(a.augmented(list(b)))
    if pivots and pivots[-1] == a.n_cols:
        return None
    x = [Fraction(0)] * a.n_cols
    for row, pc in zip(reduced.rows, pivots):
        x[pc] = row.get(a.n_cols, Fraction(0))
    return x


class SystemBuilder:
    """Collects a linear system column by column from monomial coefficients.

    Rows are keyed by (tag, monomial); the same monomial under different tags
    belongs to different equations. Rows and columns keep insertion order.
    """

    def __init__(self):
        self.columns: List = []
        self._rows: Dict = {}
        self._entries: List[Row] = []
        self._rhs: Dict[int, Fraction] = {}

    def _row(self, key) -> int:
        if key not in self._rows:
            self._rows[key] = len(self._entries)
            self._entries.append({})
        return self._rows[key]

    def add_column(self, key, *tagged_terms) -> int:
        """Add an unknown; each argument is a (tag, iterable of (monomial, coeff))."""
        col = len(self.columns)
        self.columns.append(key)
        for tag, terms in tagged_terms:
            for mono, c in terms:
                row = self._entries[self._row((tag, mono))]
                row[col] = row.get(col, 0) + c
        return col

    def set_rhs(self, tag, terms):
        for mono, c in terms:
            row = self._row((tag, mono))
            self._rhs[row] = self._rhs.get(row, 0) + c

    def matrix(self) -> RationalMatrix:
        return RationalMatrix(len(self._entries), len(self.columns), self._entries)

    def rhs(self) -> List[Fraction]:
        return [Fraction(self._rhs.get(i, 0)) for i in range(len(self._entries))]

    def solve(self) -> Optional[List[Fraction]]:
        if not self.columns:
            return [] if not any(self.rhs()) else None
        return solve(self.matrix(), self.rhs())

    def nullspace(self) -> List[List[Fraction]]:
        return nullspace(self.matrix())
