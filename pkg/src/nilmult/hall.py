"""Hall basic commutators: generation, Witt counts, bidegree decompositions.

Conventions fixed once for the whole package:

* Generators are ``x1 .. xn``; weight-1 basis elements are the leaves in
  ascending index order.
* A pair ``[c1, c2]`` is basic iff ``c1 > c2`` and, when ``c1 = [c11, c12]``,
  additionally ``c12 <= c2``.
* The total order is weight first, ties broken by recursive lexicographic
  comparison of (left, right).  This order is what the on-disk cache version
  tag protects.

For two blocks of generators (the first ``m`` and the last ``n``), the mixed
basic commutators of weight ``c`` count the rank of the free abelian layer
between successive relative lower central terms of a free product; the
bigraded Mobius/necklace formula provides an independent count per bidegree.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, gcd

from .abelian import FgAbelianGroup, direct_sum, tensor, tensor_power
from .errors import FormatError, ResourceCapError

DEFAULT_BASIS_CAP = 10 ** 6
ORDER_VERSION = "weight-lex-v1"  # bump if the basis order convention changes


@dataclass(frozen=True)
class BasicCommutator:
    """A leaf x_i or a bracket [left, right]; weight = number of leaves."""

    weight: int
    multidegree: tuple[int, ...]
    generator: int | None = None
    left: "BasicCommutator | None" = None
    right: "BasicCommutator | None" = None

    @classmethod
    def leaf(cls, i: int, n: int) -> "BasicCommutator":
        deg = tuple(1 if j == i else 0 for j in range(1, n + 1))
        return cls(weight=1, multidegree=deg, generator=i)

    @classmethod
    def pair(cls, left: "BasicCommutator", right: "BasicCommutator") -> "BasicCommutator":
        deg = tuple(a + b for a, b in zip(left.multidegree, right.multidegree))
        return cls(weight=left.weight + right.weight, multidegree=deg,
                   left=left, right=right)

    @property
    def is_leaf(self) -> bool:
        return self.generator is not None

    def sort_key(self):
        if self.is_leaf:
            return (1, self.generator)
        return (self.weight, self.left.sort_key(), self.right.sort_key())

    def __lt__(self, other: "BasicCommutator") -> bool:
        return self.sort_key() < other.sort_key()

    def __le__(self, other: "BasicCommutator") -> bool:
        return self.sort_key() <= other.sort_key()

    def leaves(self) -> list[int]:
        """Leaf generator indices in left-to-right order."""
        if self.is_leaf:
            return [self.generator]
        return self.left.leaves() + self.right.leaves()

    def __str__(self):
        if self.is_leaf:
            return f"x{self.generator}"
        return f"[{self.left},{self.right}]"

    def to_json_obj(self):
        if self.is_leaf:
            return {"gen": self.generator}
        return {"left": self.left.to_json_obj(), "right": self.right.to_json_obj()}

    @classmethod
    def from_json_obj(cls, obj, n: int) -> "BasicCommutator":
        if not isinstance(obj, dict):
            raise FormatError("commutator JSON must be an object")
        if set(obj) == {"gen"}:
            return cls.leaf(int(obj["gen"]), n)
        if set(obj) == {"left", "right"}:
            return cls.pair(cls.from_json_obj(obj["left"], n),
                            cls.from_json_obj(obj["right"], n))
        raise FormatError(f"bad commutator keys: {sorted(obj)}")


@dataclass(frozen=True)
class HallBasis:
    """All basic commutators on ``generator_count`` letters through ``max_weight``."""

    generator_count: int
    max_weight: int
    elements: tuple[tuple[BasicCommutator, ...], ...]  # index w-1 -> weight-w list

    def at_weight(self, w: int) -> tuple[BasicCommutator, ...]:
        return self.elements[w - 1]

    def all_elements(self) -> list[BasicCommutator]:
        return [b for layer in self.elements for b in layer]

    def __len__(self):
        return sum(len(layer) for layer in self.elements)


def _mobius(n: int) -> int:
    if n == 1:
        return 1
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1 if p == 2 else 2
    if n > 1:
        result = -result
    return result


def witt(n: int, w: int) -> int:
    """Number of basic commutators of weight w on n generators."""
    if n < 0 or w < 1:
        raise ValueError("witt needs n >= 0, w >= 1")
    total = 0
    for d in range(1, w + 1):
        if w % d == 0:
            total += _mobius(d) * n ** (w // d)
    assert total % w == 0
    return total // w


@lru_cache(maxsize=None)
def _generate_layers(n: int, w: int) -> tuple[tuple[BasicCommutator, ...], ...]:
    layers: list[tuple[BasicCommutator, ...]] = [
        tuple(BasicCommutator.leaf(i, n) for i in range(1, n + 1))
    ]
    for k in range(2, w + 1):
        found = []
        for wr in range(1, k // 2 + 1):
            wl = k - wr
            lefts = layers[wl - 1]
            rights = layers[wr - 1]
            for a in lefts:
                a_ok_key = None if a.is_leaf else a.right.sort_key()
                for b in rights:
                    if wl == wr and not (a.sort_key() > b.sort_key()):
                        continue
                    if a_ok_key is not None and a_ok_key > b.sort_key():
                        continue
                    found.append(BasicCommutator.pair(a, b))
        found.sort(key=BasicCommutator.sort_key)
        layers.append(tuple(found))
        assert len(found) == witt(n, k), f"enumeration mismatch at weight {k}"
    return tuple(layers)


def generate(n: int, w: int, cap: int = DEFAULT_BASIS_CAP) -> HallBasis:
    """The complete Hall basis through weight w, under the fixed order."""
    if n < 1 or w < 1:
        raise ValueError("generate needs n >= 1, w >= 1")
    expected = sum(witt(n, k) for k in range(1, w + 1))
    if expected > cap:
        raise ResourceCapError(
            f"Hall basis for n={n}, w={w} has {expected} elements, over the cap {cap}")
    return HallBasis(n, w, _generate_layers(n, w))


def mixed_rank(m: int, n: int, c: int) -> int:
    """Rank of the weight-c layer spanned by commutators mixing both blocks."""
    if m < 1 or n < 1 or c < 2:
        raise ValueError("mixed_rank needs m, n >= 1 and c >= 2")
    return witt(m + n, c) - witt(m, c) - witt(n, c)


def bidegree_count(m: int, n: int, c: int,
                   cap: int = DEFAULT_BASIS_CAP) -> dict[tuple[int, int], int]:
    """Mixed basic commutators of weight c counted by (block-1, block-2) degree.

    Keys (i, j) have i, j >= 1 and i + j = c; values sum to mixed_rank(m, n, c).
    """
    if m < 1 or n < 1 or c < 2:
        raise ValueError("bidegree_count needs m, n >= 1 and c >= 2")
    basis = generate(m + n, c, cap=cap)
    counts: dict[tuple[int, int], int] = {}
    for b in basis.at_weight(c):
        i = sum(b.multidegree[:m])
        j = c - i
        if i == 0 or j == 0:
            continue
        counts[(i, j)] = counts.get((i, j), 0) + 1
    return dict(sorted(counts.items(), key=lambda kv: (-kv[0][0], kv[0][1])))


def necklace_count(m: int, n: int, i: int, j: int) -> int:
    """Bigraded Witt/necklace formula: dimension of the (i, j) bidegree layer.

    (1/(i+j)) * sum over d | gcd(i, j) of mu(d) * C((i+j)/d, i/d) * m^(i/d) * n^(j/d).
    Independent of the tree enumeration behind bidegree_count.
    """
    if i < 1 or j < 1:
        raise ValueError("necklace_count needs i, j >= 1")
    w = i + j
    g = gcd(i, j)
    total = 0
    for d in range(1, g + 1):
        if g % d == 0:
            total += _mobius(d) * comb(w // d, i // d) * m ** (i // d) * n ** (j // d)
    assert total % w == 0
    return total // w


@dataclass(frozen=True)
class GradedSummand:
    bidegree: tuple[int, int]
    count: int
    group: FgAbelianGroup


@dataclass(frozen=True)
class GradedPieceReport:
    group: FgAbelianGroup
    summands: tuple[GradedSummand, ...]
    mode: str                 # "leaf-pattern" or "bidegree-multiplicity"
    exact_for_free_inputs: bool

    def to_json_obj(self) -> dict:
        return {
            "group": self.group.to_json_obj(),
            "summands": [{"bidegree": list(s.bidegree), "count": s.count,
                          "group": s.group.to_json_obj()} for s in self.summands],
            "mode": self.mode,
            "exact": self.exact_for_free_inputs,
        }


def graded_piece(gab: FgAbelianGroup, hab: FgAbelianGroup, c: int,
                 m: int, n: int, cap: int = DEFAULT_BASIS_CAP) -> GradedPieceReport:
    """Weight-c layer of the mixed commutator filtration with coefficients.

    When gab and hab split into exactly m and n cyclic factors, each mixed
    basic commutator contributes the tensor of the factors its leaves name;
    for gab = Z^m, hab = Z^n this reproduces Z^mixed_rank(m, n, c).  Otherwise
    falls back to full tensor powers with bidegree multiplicities, which is a
    heuristic reading for non-free coefficients.
    """
    if m < 1 or n < 1 or c < 2:
        raise ValueError("graded_piece needs m, n >= 1 and c >= 2")
    gfac = gab.cyclic_orders()
    hfac = hab.cyclic_orders()
    exact = gab == FgAbelianGroup.free(m) and hab == FgAbelianGroup.free(n)
    if len(gfac) == m and len(hfac) == n:
        basis = generate(m + n, c, cap=cap)
        per_bidegree: dict[tuple[int, int], list[FgAbelianGroup]] = {}
        for b in basis.at_weight(c):
            i = sum(b.multidegree[:m])
            j = c - i
            if i == 0 or j == 0:
                continue
            piece = FgAbelianGroup.free(1)
            for leaf in b.leaves():
                order = gfac[leaf - 1] if leaf <= m else hfac[leaf - m - 1]
                piece = tensor(piece, FgAbelianGroup.cyclic(order))
            per_bidegree.setdefault((i, j), []).append(piece)
        summands = tuple(
            GradedSummand(bd, len(pieces), direct_sum(*pieces))
            for bd, pieces in sorted(per_bidegree.items(), key=lambda kv: (-kv[0][0], kv[0][1]))
        )
        total = direct_sum(*(s.group for s in summands)) if summands else FgAbelianGroup.trivial()
        return GradedPieceReport(total, summands, "leaf-pattern", exact)

    counts = bidegree_count(m, n, c, cap=cap)
    summands = tuple(
        GradedSummand(bd, cnt,
                      direct_sum(*([tensor(tensor_power(gab, bd[0]), tensor_power(hab, bd[1]))]
                                   * cnt)))
        for bd, cnt in counts.items()
    )
    total = direct_sum(*(s.group for s in summands)) if summands else FgAbelianGroup.trivial()
    return GradedPieceReport(total, summands, "bidegree-multiplicity", exact)
