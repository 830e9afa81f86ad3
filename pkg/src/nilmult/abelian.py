"""Finitely generated abelian groups in invariant-factor canonical form.

A value is ``Z^free_rank + Z/d1 + Z/d2 + ...`` with ``d1 | d2 | ...`` and every
``d_i >= 2``; the trivial group is ``free_rank=0`` with no factors.  Equality
of values is equality of groups, which is what makes report output and tests
exact.  Tensor, Tor and direct sums are computed on the prime-power
(elementary divisor) decomposition and re-chained.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, prod

from .errors import FormatError
from .matrix import IntegerMatrix, diagonal_invariants

_JSON_INT_LIMIT = 1 << 53


def _factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division; fine for invariant factors."""
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _chain_from_prime_powers(pp: dict[int, list[int]]) -> tuple[int, ...]:
    """Re-chain elementary divisors {p: [e1 >= e2 >= ...]} into invariant factors."""
    for p in pp:
        pp[p] = sorted((e for e in pp[p] if e > 0), reverse=True)
    length = max((len(v) for v in pp.values()), default=0)
    factors = []
    for k in range(length):
        d = 1
        for p, exps in pp.items():
            if k < len(exps):
                d *= p ** exps[k]
        factors.append(d)
    return tuple(reversed(factors))  # ascending divisibility chain


@dataclass(frozen=True)
class FgAbelianGroup:
    free_rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        object.__setattr__(self, "invariant_factors",
                           tuple(int(d) for d in self.invariant_factors))
        for d in self.invariant_factors:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
        for a, b in zip(self.invariant_factors, self.invariant_factors[1:]):
            if b % a != 0:
                raise ValueError(f"broken divisibility chain: {a} does not divide {b}")

    # -- constructors -----------------------------------------------------

    @classmethod
    def trivial(cls) -> "FgAbelianGroup":
        return cls(0, ())

    @classmethod
    def free(cls, rank: int) -> "FgAbelianGroup":
        return cls(rank, ())

    @classmethod
    def cyclic(cls, n: int) -> "FgAbelianGroup":
        """Z/n, with Z/0 = Z and Z/1 trivial."""
        n = abs(n)
        if n == 0:
            return cls(1, ())
        if n == 1:
            return cls(0, ())
        return cls(0, (n,))

    @classmethod
    def from_cyclic_orders(cls, orders) -> "FgAbelianGroup":
        """Direct sum of Z/n over the list; 0 means a free Z summand."""
        out = cls.trivial()
        for n in orders:
            out = direct_sum(out, cls.cyclic(n))
        return out

    # -- structure ---------------------------------------------------------

    def _prime_powers(self) -> dict[int, list[int]]:
        pp: dict[int, list[int]] = {}
        for d in self.invariant_factors:
            for p, e in _factorize(d).items():
                pp.setdefault(p, []).append(e)
        return pp

    def order(self) -> int | None:
        """Group order; None means infinite."""
        if self.free_rank > 0:
            return None
        return prod(self.invariant_factors) if self.invariant_factors else 1

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def exponent(self) -> int | None:
        """Smallest e > 0 with e*G = 0 for finite G, else None."""
        if self.free_rank > 0:
            return None
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def cyclic_orders(self) -> list[int]:
        """Canonical cyclic decomposition, torsion first, 0 per free summand."""
        return list(self.invariant_factors) + [0] * self.free_rank

    def element_order_census(self, bound: int) -> dict[int, int]:
        """For finite G: {d: #elements of order dividing d} for d in 1..bound."""
        if self.free_rank:
            raise ValueError("census needs a finite group")
        return {d: prod(gcd(d, f) for f in self.invariant_factors)
                for d in range(1, bound + 1)}

    # -- serialization -----------------------------------------------------

    def to_json_obj(self) -> dict:
        def enc(v: int):
            return str(v) if v > _JSON_INT_LIMIT else v

        return {"free_rank": self.free_rank,
                "invariant_factors": [enc(d) for d in self.invariant_factors]}

    @classmethod
    def from_json_obj(cls, obj) -> "FgAbelianGroup":
        if not isinstance(obj, dict):
            raise FormatError("group JSON must be an object")
        extra = set(obj) - {"free_rank", "invariant_factors"}
        if extra:
            raise FormatError(f"unknown group keys: {sorted(extra)}")
        try:
            rank = int(obj["free_rank"])
            factors = tuple(int(d) for d in obj["invariant_factors"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad group JSON: {exc}") from exc
        try:
            return cls(rank, factors)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z_{d}" for d in self.invariant_factors]
        return " + ".join(parts) if parts else "0"


def cokernel(a: IntegerMatrix) -> FgAbelianGroup:
    """Z^cols modulo the row lattice of ``a`` (rows are relations)."""
    diag = diagonal_invariants(a)
    return FgAbelianGroup(free_rank=a.cols - len(diag),
                          invariant_factors=tuple(d for d in diag if d != 1))


def direct_sum(*groups: FgAbelianGroup) -> FgAbelianGroup:
    pp: dict[int, list[int]] = {}
    rank = 0
    for g in groups:
        rank += g.free_rank
        for p, exps in g._prime_powers().items():
            pp.setdefault(p, []).extend(exps)
    return FgAbelianGroup(rank, _chain_from_prime_powers(pp))


def tensor(g: FgAbelianGroup, h: FgAbelianGroup) -> FgAbelianGroup:
    """Bilinear expansion: Z*Z=Z, Z*Z_n=Z_n, Z_m*Z_n=Z_gcd(m,n), prime by prime."""
    gp, hp = g._prime_powers(), h._prime_powers()
    pp: dict[int, list[int]] = {}
    for p in set(gp) | set(hp):
        e1, e2 = gp.get(p, []), hp.get(p, [])
        exps = [min(a, b) for a in e1 for b in e2]
        exps += e1 * h.free_rank + e2 * g.free_rank
        pp[p] = exps
    return FgAbelianGroup(g.free_rank * h.free_rank, _chain_from_prime_powers(pp))


def tor(g: FgAbelianGroup, h: FgAbelianGroup) -> FgAbelianGroup:
    """Torsion product: free summands contribute nothing; symmetric."""
    gp, hp = g._prime_powers(), h._prime_powers()
    pp = {p: [min(a, b) for a in gp[p] for b in hp[p]] for p in set(gp) & set(hp)}
    return FgAbelianGroup(0, _chain_from_prime_powers(pp))


def tensor_power(g: FgAbelianGroup, i: int) -> FgAbelianGroup:
    if i < 0:
        raise ValueError("tensor power needs i >= 0")
    out = FgAbelianGroup.free(1)  # empty tensor product is Z
    for _ in range(i):
        out = tensor(out, g)
    return out
