"""Exact integer matrices: Smith normal form, kernels, lattice solving.

All entries are Python ints, so arithmetic never overflows.  Convention used
throughout the package: in a relation matrix the *rows* are relations on the
column generators, i.e. ``cokernel(A)`` presents ``Z^cols / row-space(A)``.
Simplicial map matrices act on column vectors instead; that convention is
stated where those matrices are built.

Where a product is needed on certifiably small inputs, ``matmul`` routes
through numpy int64 after checking that no intermediate value can reach
2^62; otherwise it falls back to exact pure-Python multiplication.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .errors import FormatError

_JSON_INT_LIMIT = 1 << 53  # beyond this, encode as decimal string


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) = a*x + b*y and g >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


@dataclass(frozen=True)
class IntegerMatrix:
    """Immutable dense integer matrix in row-major order."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimensions")
        if len(self.entries) != self.rows:
            raise ValueError("row count mismatch")
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("column count mismatch")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntegerMatrix":
        rows = [tuple(int(v) for v in row) for row in rows]
        if cols is None:
            if not rows:
                raise ValueError("cols required for an empty matrix")
            cols = len(rows[0])
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls(rows, cols, tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix(self.cols, self.rows,
                             tuple(tuple(self.entries[i][j] for i in range(self.rows))
                                   for j in range(self.cols)))

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        return matmul(self, other)

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.entries for v in row)

    def max_abs(self) -> int:
        return max((abs(v) for row in self.entries for v in row), default=0)

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def to_json_obj(self) -> dict:
        def enc(v: int):
            return str(v) if abs(v) > _JSON_INT_LIMIT else v

        return {"rows": self.rows, "cols": self.cols,
                "entries": [[enc(v) for v in row] for row in self.entries]}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "IntegerMatrix":
        if not isinstance(obj, dict):
            raise FormatError("matrix JSON must be an object")
        extra = set(obj) - {"rows", "cols", "entries"}
        if extra:
            raise FormatError(f"unknown matrix keys: {sorted(extra)}")
        try:
            rows, cols = int(obj["rows"]), int(obj["cols"])
            entries = [[int(v) for v in row] for row in obj["entries"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad matrix JSON: {exc}") from exc
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise FormatError("matrix JSON shape mismatch")
        return cls.from_rows(entries, cols)

    def __str__(self):
        return json.dumps(self.to_json_obj())


def matmul(a: IntegerMatrix, b: IntegerMatrix) -> IntegerMatrix:
    """Exact product; numpy int64 fast path when bounds certify no overflow."""
    if a.cols != b.rows:
        raise ValueError(f"shape mismatch: {a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    bound = a.max_abs() * b.max_abs() * max(a.cols, 1)
    if bound < (1 << 62) and a.rows and a.cols and b.cols:
        prod = np.array(a.to_lists(), dtype=np.int64) @ np.array(b.to_lists(), dtype=np.int64)
        return IntegerMatrix.from_rows(prod.tolist(), b.cols)
    out = []
    bt = b.transpose().entries
    for row in a.entries:
        out.append(tuple(sum(x * y for x, y in zip(row, col)) for col in bt))
    return IntegerMatrix(a.rows, b.cols, tuple(out))


def determinant(a: IntegerMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if a.rows != a.cols:
        raise ValueError("determinant needs a square matrix")
    n = a.rows
    if n == 0:
        return 1
    m = [list(row) for row in a.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SmithForm:
    """U @ A @ V = S with U, V unimodular and S = diag(d1 | d2 | ...)."""

    U: IntegerMatrix
    S: IntegerMatrix
    V: IntegerMatrix
    diagonal: tuple[int, ...]


def _snf_inplace(m: list[list[int]], rows: int, cols: int,
                 u: list[list[int]] | None, v: list[list[int]] | None) -> list[int]:
    """Diagonalize m by unimodular row/col ops, tracking transforms if given.

    Returns the cleaned diagonal (positive, divisibility chain, zeros dropped).
    """

    def row_op(i, j, q):  # row_i -= q * row_j
        mi, mj = m[i], m[j]
        for k in range(cols):
            mi[k] -= q * mj[k]
        if u is not None:
            ui, uj = u[i], u[j]
            for k in range(len(ui)):
                ui[k] -= q * uj[k]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in range(rows):
            m[r][i] -= q * m[r][j]
        if v is not None:
            for r in range(len(v)):
                v[r][i] -= q * v[r][j]

    def row_swap(i, j):
        m[i], m[j] = m[j], m[i]
        if u is not None:
            u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for r in range(rows):
            m[r][i], m[r][j] = m[r][j], m[r][i]
        if v is not None:
            for r in range(len(v)):
                v[r][i], v[r][j] = v[r][j], v[r][i]

    def row_negate(i):
        m[i] = [-x for x in m[i]]
        if u is not None:
            u[i] = [-x for x in u[i]]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        # minimal absolute value pivot limits entry growth
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                val = abs(m[i][j])
                if val and (best is None or val < best):
                    best = val
                    pivot = (i, j)
                    if val == 1:
                        break
            if best == 1:
                break
        if pivot is None:
            break
        pi, pj = pivot
        row_swap(t, pi)
        col_swap(t, pj)
        # clear row and column t; repeat until stable (pivot may shrink)
        while True:
            p = m[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if m[i][t]:
                    q = m[i][t] // p
                    row_op(i, t, q)
                    if m[i][t]:  # remainder became new, smaller pivot
                        row_swap(t, i)
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(t + 1, cols):
                if m[t][j]:
                    q = m[t][j] // p
                    col_op(j, t, q)
                    if m[t][j]:
                        col_swap(t, j)
                        dirty = True
                        break
            if not dirty:
                break
        if m[t][t] < 0:
            row_negate(t)
        t += 1

    # enforce the divisibility chain d_i | d_{i+1}
    changed = True
    while changed:
        changed = False
        for i in range(t - 1):
            a, b = m[i][i], m[i + 1][i + 1]
            if a and b % a != 0:
                # fold b into row i: col_{i} += col_{i+1}; re-clear the 2x2 block
                col_op(i, i + 1, -1)
                g, x, y = _xgcd(m[i][i], m[i + 1][i])
                # row combination [[x, y], [-b//g, a//g]] on rows (i, i+1)
                ai, bi = m[i][i], m[i + 1][i]
                ri = [x * p + y * q for p, q in zip(m[i], m[i + 1])]
                rj = [(-bi // g) * p + (ai // g) * q for p, q in zip(m[i], m[i + 1])]
                m[i], m[i + 1] = ri, rj
                if u is not None:
                    ui = [x * p + y * q for p, q in zip(u[i], u[i + 1])]
                    uj = [(-bi // g) * p + (ai // g) * q for p, q in zip(u[i], u[i + 1])]
                    u[i], u[i + 1] = ui, uj
                # now m[i][i] = g divides everything in the block; clear col i+1 on row i
                q = m[i][i + 1] // m[i][i]
                col_op(i + 1, i, q)
                if m[i][i] < 0:
                    row_negate(i)
                if m[i + 1][i + 1] < 0:
                    row_negate(i + 1)
                changed = True
    return [m[i][i] for i in range(t) if m[i][i] != 0]


def smith_normal_form(a: IntegerMatrix) -> SmithForm:
    """Smith normal form with unimodular transforms; verified by multiplying back."""
    m = [list(row) for row in a.entries]
    u = [[1 if i == j else 0 for j in range(a.rows)] for i in range(a.rows)]
    v = [[1 if i == j else 0 for j in range(a.cols)] for i in range(a.cols)]
    diag = _snf_inplace(m, a.rows, a.cols, u, v)
    U = IntegerMatrix.from_rows(u, a.rows) if a.rows else IntegerMatrix(0, 0, ())
    V = IntegerMatrix.from_rows(v, a.cols) if a.cols else IntegerMatrix(0, 0, ())
    S = IntegerMatrix.from_rows(m, a.cols) if a.rows else IntegerMatrix(0, a.cols, ())
    check = matmul(matmul(U, a), V)
    if check.entries != S.entries:
        raise AssertionError("SNF verification failed: U*A*V != S")
    full = list(diag) + [0] * (min(a.rows, a.cols) - len(diag))
    return SmithForm(U=U, S=S, V=V, diagonal=tuple(full))


def diagonal_invariants(a: IntegerMatrix) -> list[int]:
    """Nonzero SNF diagonal entries of ``a`` (no transforms tracked)."""
    m = [list(row) for row in a.entries]
    return _snf_inplace(m, a.rows, a.cols, None, None)


def sparse_row_echelon(rows: Iterable[dict[int, int]]) -> dict[int, dict[int, int]]:
    """Integer row echelon of sparse rows (dict col -> value), pivot per column.

    The transformations used are unimodular, so the row lattice is preserved
    exactly.  Returns {pivot column: row dict}.
    """
    pivots: dict[int, dict[int, int]] = {}
    for row in rows:
        row = {k: v for k, v in row.items() if v}
        while row:
            j = min(row)
            if j not in pivots:
                pivots[j] = row
                break
            piv = pivots[j]
            a, b = piv[j], row[j]
            if b % a == 0:
                q = b // a
                for k, v in piv.items():
                    nv = row.get(k, 0) - q * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
            else:
                g, x, y = _xgcd(a, b)
                new_piv: dict[int, int] = {}
                new_row: dict[int, int] = {}
                for k in set(piv) | set(row):
                    p, r = piv.get(k, 0), row.get(k, 0)
                    np_ = x * p + y * r
                    nr = (a // g) * r - (b // g) * p
                    if np_:
                        new_piv[k] = np_
                    if nr:
                        new_row[k] = nr
                pivots[j] = new_piv
                row = new_row
    return pivots


def integer_rank(a: IntegerMatrix) -> int:
    return len(sparse_row_echelon(
        {j: v for j, v in enumerate(row) if v} for row in a.entries))


def kernel_basis(a: IntegerMatrix) -> IntegerMatrix:
    """Basis of {x : A x = 0} as columns; the lattice is saturated in Z^cols.

    Computed from the row echelon of [A^T | I]: rows whose A^T-part vanishes
    carry kernel vectors in the I-part.
    """
    n = a.cols
    t = a.rows
    aug = []
    for i in range(n):
        row = {j: a.entries[j][i] for j in range(t) if a.entries[j][i]}
        row[t + i] = 1
        aug.append(row)
    ech = sparse_row_echelon(aug)
    kernel_rows = []
    for j in sorted(ech):
        if j >= t:  # A^T-part is zero
            vec = [0] * n
            for k, v in ech[j].items():
                vec[k - t] = v
            kernel_rows.append(vec)
    if not kernel_rows:
        return IntegerMatrix(n, 0, tuple(() for _ in range(n)))
    return IntegerMatrix.from_rows(kernel_rows, n).transpose()


class LatticeSolver:
    """Express vectors as exact integer combinations of fixed lattice rows."""

    def __init__(self, rows: Sequence[Sequence[int]], width: int):
        self.width = width
        self.n = len(rows)
        aug = []
        for i, row in enumerate(rows):
            d = {j: v for j, v in enumerate(row) if v}
            d[width + i] = 1
            aug.append(d)
        ech = sparse_row_echelon(aug)
        self._pivots = {j: ech[j] for j in ech if j < width}

    def solve(self, target: Sequence[int] | dict[int, int]) -> list[int] | None:
        """Coefficients c with sum(c_i * row_i) = target, or None if unsolvable."""
        if isinstance(target, dict):
            rem = {k: v for k, v in target.items() if v}
        else:
            rem = {j: v for j, v in enumerate(target) if v}
        coeff = [0] * self.n
        while rem:
            j = min(rem)
            if j >= self.width or j not in self._pivots:
                return None
            piv = self._pivots[j]
            if rem[j] % piv[j] != 0:
                return None
            q = rem[j] // piv[j]
            for k, v in piv.items():
                if k < self.width:
                    nv = rem.get(k, 0) - q * v
                    if nv:
                        rem[k] = nv
                    else:
                        rem.pop(k, None)
                else:
                    coeff[k - self.width] += q * v
        return coeff
