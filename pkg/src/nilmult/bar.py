"""Integral homology of finite groups from the normalized bar complex.

This is the independent oracle the multiplier engine is checked against:
``bar_h1`` is the abelianization, ``bar_h2`` the Schur multiplier, both read
off the chain complex Z[G^3] -> Z[G^2] -> Z[G] on tuples of non-identity
elements.

``bar_h2`` splits the computation: the free-rank bookkeeping needs only the
exact rank of the small degree-2 boundary, and all torsion of H_2 divides
|G| (the transfer kills H_n(G) for n >= 1 at exponent |G|, and H_2 is a
finitely generated torsion group, hence finite).  Since m * Z^k lies inside
the working lattice, every entry may be reduced mod m = |G|, which keeps all
intermediate values below m and makes int64 arithmetic certifiably exact.
``bar_h2_exact`` is the plain all-integer path, kept for cross-checks at
small orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .abelian import FgAbelianGroup, _chain_from_prime_powers, _factorize, cokernel
from .errors import FormatError, ResourceCapError
from .matrix import IntegerMatrix, sparse_row_echelon

DEFAULT_ORDER_CAP = 24


@dataclass(frozen=True)
class FiniteGroupTable:
    """Multiplication table group: table[a][b] is the index of a*b."""

    order: int
    table: tuple[tuple[int, ...], ...]
    identity: int

    def __post_init__(self):
        n = self.order
        if n < 1 or len(self.table) != n or any(len(r) != n for r in self.table):
            raise FormatError("table shape mismatch")
        t = np.array(self.table, dtype=np.int64)
        if t.size and (t.min() < 0 or t.max() >= n):
            raise FormatError("table entries out of range")
        e = self.identity
        if not (0 <= e < n):
            raise FormatError("identity index out of range")
        if not (np.array_equal(t[e], np.arange(n)) and np.array_equal(t[:, e], np.arange(n))):
            raise FormatError("identity row/column is not the identity")
        for a in range(n):
            if e not in t[a]:
                raise FormatError(f"element {a} has no inverse")
        left = t[t, :]          # left[a,b,c] = t[t[a,b], c]
        right = t[:, t]         # right[a,b,c] = t[a, t[b,c]]
        if not np.array_equal(left, right):
            raise FormatError("multiplication table is not associative")

    def mult(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.table[a].index(self.identity)

    def is_abelian(self) -> bool:
        t = np.array(self.table)
        return np.array_equal(t, t.T)

    def element_orders(self) -> list[int]:
        out = []
        for a in range(self.order):
            x, k = a, 1
            while x != self.identity:
                x = self.mult(x, a)
                k += 1
            out.append(k)
        return out

    def to_json_obj(self) -> dict:
        return {"order": self.order, "identity": self.identity,
                "table": [list(r) for r in self.table]}

    @classmethod
    def from_json_obj(cls, obj) -> "FiniteGroupTable":
        if not isinstance(obj, dict):
            raise FormatError("table JSON must be an object")
        extra = set(obj) - {"order", "identity", "table"}
        if extra:
            raise FormatError(f"unknown table keys: {sorted(extra)}")
        try:
            return cls(order=int(obj["order"]),
                       table=tuple(tuple(int(v) for v in row) for row in obj["table"]),
                       identity=int(obj["identity"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad table JSON: {exc}") from exc


def _nonidentity(table: FiniteGroupTable) -> list[int]:
    return [g for g in range(table.order) if g != table.identity]


def _pair_index(table: FiniteGroupTable):
    elems = _nonidentity(table)
    pairs = {}
    for a in elems:
        for b in elems:
            pairs[(a, b)] = len(pairs)
    return elems, pairs


def _d2_rows(table: FiniteGroupTable, elems, pairs):
    """Rows of d2 over pair columns -> element columns: (a,b) -> b - ab + a."""
    e = table.identity
    col = {g: i for i, g in enumerate(elems)}
    rows = []
    for (a, b), _ in sorted(pairs.items(), key=lambda kv: kv[1]):
        row: dict[int, int] = {}
        for g, sign in ((b, 1), (table.mult(a, b), -1), (a, 1)):
            if g != e:
                row[col[g]] = row.get(col[g], 0) + sign
        rows.append({k: v for k, v in row.items() if v})
    return rows


def _d3_row(table: FiniteGroupTable, pairs, a: int, b: int, c: int):
    """(a,b,c) -> (b,c) - (ab,c) + (a,bc) - (a,b), identity coordinates dropped."""
    e = table.identity
    row: dict[int, int] = {}
    for pair, sign in (((b, c), 1), ((table.mult(a, b), c), -1),
                       ((a, table.mult(b, c)), 1), ((a, b), -1)):
        if e in pair:
            continue
        j = pairs[pair]
        row[j] = row.get(j, 0) + sign
    return {k: v for k, v in row.items() if v}


def bar_h1(table: FiniteGroupTable) -> FgAbelianGroup:
    """H_1(G) = G^ab as the cokernel of the degree-2 boundary."""
    elems, pairs = _pair_index(table)
    if not elems:
        return FgAbelianGroup.trivial()
    rows = _d2_rows(table, elems, pairs)
    dense = []
    for row in rows:
        vec = [0] * len(elems)
        for k, v in row.items():
            vec[k] = v
        dense.append(vec)
    return cokernel(IntegerMatrix.from_rows(dense, len(elems)))


def _coker_orders_mod(rows: list[dict[int, int]], ncols: int, m: int) -> list[int]:
    """Cyclic orders of Z^ncols / (row lattice + m Z^ncols), one per column.

    Sparse phase: repeatedly pick an entry that is a unit mod m (Markowitz-ish
    minimal fill), scale its row to make the entry 1, clear the column, and
    delete row and column -- a unit-pivot coordinate contributes Z/1.  The
    remaining non-unit core is handed to the dense diagonalizer.
    """
    live: dict[int, dict[int, int]] = {}
    col_support: dict[int, set[int]] = {}
    seen = set()
    for row in rows:
        reduced = tuple(sorted((k, v % m) for k, v in row.items() if v % m))
        if not reduced or reduced in seen:
            continue
        seen.add(reduced)
        rid = len(live)
        live[rid] = dict(reduced)
        for k, _ in reduced:
            col_support.setdefault(k, set()).add(rid)

    orders: dict[int, int] = {}
    while True:
        # smallest-support column holding a unit entry; then sparsest such row
        best = None
        for col, support in col_support.items():
            size = len(support)
            if size == 0 or (best is not None and size >= best[0]):
                continue
            found = None
            for rid in support:
                if gcd(live[rid][col], m) == 1:
                    rlen = len(live[rid])
                    if found is None or rlen < found[0]:
                        found = (rlen, rid)
            if found is not None:
                best = (size, col, found[1])
                if size == 1:
                    break
        if best is None:
            break
        _, col, rid = best
        piv = live.pop(rid)
        inv = pow(piv[col], -1, m)
        piv = {k: (v * inv) % m for k, v in piv.items()}
        piv = {k: v for k, v in piv.items() if v}
        for k in piv:
            col_support[k].discard(rid)
        for other in list(col_support.get(col, ())):
            row = live[other]
            factor = row[col]
            for k, v in piv.items():
                nv = (row.get(k, 0) - factor * v) % m
                if nv:
                    if k not in row:
                        col_support.setdefault(k, set()).add(other)
                    row[k] = nv
                else:
                    if k in row:
                        col_support[k].discard(other)
                        row.pop(k)
            if not row:
                for k in list(row):
                    col_support[k].discard(other)
                live.pop(other)
        col_support.pop(col, None)
        orders[col] = 1

    # dense phase on the non-unit core
    remaining_cols = sorted(set(col_support) | {k for r in live.values() for k in r})
    col_of = {c: i for i, c in enumerate(remaining_cols)}
    dense_rows = []
    for row in live.values():
        vec = np.zeros(len(remaining_cols), dtype=np.int64)
        for k, v in row.items():
            vec[col_of[k]] = v
        dense_rows.append(vec)
    core_orders = _diagonalize_mod(dense_rows, len(remaining_cols), m)
    for c, d in zip(remaining_cols, core_orders):
        orders[c] = d
    return [orders.get(c, m) for c in range(ncols)]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    return (old_r, old_x, old_y) if old_r >= 0 else (-old_r, -old_x, -old_y)


def _diagonalize_mod(rows: list[np.ndarray], ncols: int, m: int) -> list[int]:
    """Diagonal cyclic orders of Z^ncols / (row lattice + m Z^ncols).

    Returns one order per column (gcd with m); columns never pivoted give m.
    Only diagonality is needed: with the implicit m Z^n inside the lattice the
    quotient splits per coordinate once off-diagonal entries vanish.
    """
    if not rows:
        return [m] * ncols
    a = np.array(rows, dtype=np.int64) % m
    nr = a.shape[0]
    col_names = list(range(ncols))
    orders: dict[int, int] = {}
    t = 0
    while t < nr and t < a.shape[1]:
        sub = a[t:, t:]
        nz = sub[sub > 0]
        if not nz.size:
            break
        val = int(nz.min())
        pos = np.argwhere(sub == val)[0]
        pi, pj = int(pos[0]) + t, int(pos[1]) + t
        a[[t, pi], :] = a[[pi, t], :]
        a[:, [t, pj]] = a[:, [pj, t]]
        col_names[t], col_names[pj] = col_names[pj], col_names[t]
        while True:
            p = int(a[t, t])
            colv = a[t + 1:, t]
            if colv.size and colv.any():
                q = colv // p
                a[t + 1:, :] = (a[t + 1:, :] - q[:, None] * a[t, :]) % m
                if a[t + 1:, t].any():  # remainders became smaller pivots
                    i = int(np.nonzero(a[t + 1:, t])[0][0]) + t + 1
                    a[[t, i], :] = a[[i, t], :]
                    continue
            rowv = a[t, t + 1:]
            if rowv.size and rowv.any():
                q = rowv // p
                a[:, t + 1:] = (a[:, t + 1:] - a[:, t][:, None] * q[None, :]) % m
                if a[t, t + 1:].any():
                    j = int(np.nonzero(a[t, t + 1:])[0][0]) + t + 1
                    a[:, [t, j]] = a[:, [j, t]]
                    col_names[t], col_names[j] = col_names[j], col_names[t]
                    continue
            break
        orders[col_names[t]] = gcd(int(a[t, t]), m)
        t += 1
    for name in col_names:
        if name not in orders:
            orders[name] = m
    return [orders[c] for c in range(ncols)]


def bar_h2(table: FiniteGroupTable, cap: int = DEFAULT_ORDER_CAP) -> FgAbelianGroup:
    """H_2(G, Z) from the normalized bar complex (the Schur multiplier)."""
    m = table.order
    if m > cap:
        raise ResourceCapError(f"group order {m} exceeds the cap {cap}")
    elems, pairs = _pair_index(table)
    n2 = len(pairs)

    d2_rank = len(sparse_row_echelon(_d2_rows(table, elems, pairs)))

    def d3_rows():
        for a in elems:
            for b in elems:
                for c in elems:
                    row = _d3_row(table, pairs, a, b, c)
                    if row:
                        yield row

    orders = _coker_orders_mod(list(d3_rows()), n2, m)

    # coker(d3) tensor Z/m = (Z/m)^rank(d2) + H_2; peel off the free-part copies
    pp: dict[int, list[int]] = {}
    for d in orders:
        for p, e in _factorize(d).items():
            pp.setdefault(p, []).append(e)
    for p, e in _factorize(m).items():
        exps = sorted(pp.get(p, []), reverse=True)
        if len(exps) < d2_rank or any(x != e for x in exps[:d2_rank]):
            raise AssertionError("free-part bookkeeping failed in bar H2")
        pp[p] = exps[d2_rank:]
    return FgAbelianGroup(0, _chain_from_prime_powers(pp))


def bar_h2_exact(table: FiniteGroupTable, cap: int = 12) -> FgAbelianGroup:
    """All-integer H_2 path (torsion of coker d3); for small-order cross-checks."""
    if table.order > cap:
        raise ResourceCapError(f"group order {table.order} exceeds the cap {cap}")
    elems, pairs = _pair_index(table)
    n2 = len(pairs)
    if n2 == 0:
        return FgAbelianGroup.trivial()
    rows = []
    for a in elems:
        for b in elems:
            for c in elems:
                row = _d3_row(table, pairs, a, b, c)
                if row:
                    rows.append(row)
    ech = sparse_row_echelon(rows)
    d3_rank = len(ech)
    d2_rank = len(sparse_row_echelon(_d2_rows(table, elems, pairs)))
    if n2 - d3_rank != d2_rank:
        raise AssertionError("H_2 of a finite group came out infinite")
    dense = []
    for j in sorted(ech):
        vec = [0] * n2
        for k, v in ech[j].items():
            vec[k] = v
        dense.append(vec)
    quotient = cokernel(IntegerMatrix.from_rows(dense, n2))
    return FgAbelianGroup(0, quotient.invariant_factors)
