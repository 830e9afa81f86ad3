"""Truncated integer power series in noncommuting variables X1..Xn.

A series is a dict {monomial tuple: int coefficient} holding only nonzero
terms of total degree <= cap.  This is the computational carrier for the
group-to-series embedding x_i -> 1 + X_i used by the nilpotent normal form:
all arithmetic is exact, and truncation at the nilpotency class is what makes
every group computation terminate.
"""

from __future__ import annotations

from .errors import ResourceCapError

Monomial = tuple[int, ...]
Series = dict[Monomial, int]

DEFAULT_TERM_CAP = 10 ** 6

ONE: Series = {(): 1}


def unit() -> Series:
    return {(): 1}


def generator(i: int) -> Series:
    """The series of the group generator x_i, namely 1 + X_i."""
    return {(): 1, (i,): 1}


def mul(a: Series, b: Series, cap: int, term_cap: int = DEFAULT_TERM_CAP) -> Series:
    out: Series = {}
    for ma, ca in a.items():
        room = cap - len(ma)
        if room < 0:
            continue
        for mb, cb in b.items():
            if len(mb) > room:
                continue
            key = ma + mb
            val = out.get(key, 0) + ca * cb
            if val:
                out[key] = val
            else:
                out.pop(key, None)
    if len(out) > term_cap:
        raise ResourceCapError(f"series has {len(out)} terms, over the cap {term_cap}")
    return out


def inverse(a: Series, cap: int, term_cap: int = DEFAULT_TERM_CAP) -> Series:
    """Inverse of a series with constant term 1: sum of powers of (1 - a)."""
    if a.get((), 0) != 1:
        raise ValueError("can only invert a series with constant term 1")
    nilpart = {m: -c for m, c in a.items() if m}
    out = unit()
    power = unit()
    for _ in range(cap):
        power = mul(power, nilpart, cap, term_cap)
        if not power:
            break
        for m, c in power.items():
            val = out.get(m, 0) + c
            if val:
                out[m] = val
            else:
                out.pop(m, None)
    return out


def power(a: Series, k: int, cap: int, term_cap: int = DEFAULT_TERM_CAP) -> Series:
    if k < 0:
        return power(inverse(a, cap, term_cap), -k, cap, term_cap)
    out = unit()
    base = dict(a)
    while k:
        if k & 1:
            out = mul(out, base, cap, term_cap)
        k >>= 1
        if k:
            base = mul(base, base, cap, term_cap)
    return out


def group_commutator(a: Series, b: Series, cap: int,
                     term_cap: int = DEFAULT_TERM_CAP) -> Series:
    """a^-1 b^-1 a b."""
    ia = inverse(a, cap, term_cap)
    ib = inverse(b, cap, term_cap)
    return mul(mul(mul(ia, ib, cap, term_cap), a, cap, term_cap), b, cap, term_cap)


def degree_part(a: Series, d: int) -> Series:
    return {m: c for m, c in a.items() if len(m) == d}


def min_positive_degree(a: Series) -> int | None:
    degs = [len(m) for m in a if m]
    return min(degs) if degs else None


def is_unit_series(a: Series) -> bool:
    return a == {(): 1} or (a.get((), 0) == 1 and all(c == 0 for m, c in a.items() if m))


def lie_mul(a: Series, b: Series, cap: int) -> Series:
    """Lie bracket ab - ba in the associative algebra, truncated."""
    ab = mul(a, b, cap)
    ba = mul(b, a, cap)
    out = dict(ab)
    for m, c in ba.items():
        val = out.get(m, 0) - c
        if val:
            out[m] = val
        else:
            out.pop(m, None)
    return out
