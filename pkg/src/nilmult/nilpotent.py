"""Free nilpotent groups F/gamma_{c+1}(F): normal forms and multipliers.

Conventions (used everywhere in the package):

* ``[a, b] = a^-1 b^-1 a b``; iterated brackets are left-normed,
  ``[a, b, c] = [[a, b], c]``.
* The normal form of an element is the ordered product ``prod b^e(b)`` over
  the Hall basis through weight c; equality of elements is equality of
  exponent vectors.

Normalization works through the embedding ``x_i -> 1 + X_i`` into truncated
power series: a word lands on ``1 + (weight-1 layer) + ...``; peeling one
weight layer at a time, the lowest-degree part of the residual series is a
Lie element whose integer coordinates over the Hall-basis Lie vectors are the
exponents of that layer.  Dividing the layer off and repeating yields the
unique normal form, with a final check that the residual series is exactly 1.

The multiplier computation for a finitely generated abelian group presented
by cyclic orders n_1..n_k (0 meaning a Z summand) is the cokernel of the
lattice spanned by ``n_i * [x_i, x_j1, ..., x_jc]`` inside the free abelian
weight-(c+1) layer: brackets on relators are multilinear at top weight, and
iterated brackets starting at a generator span the whole weight layer of the
ideal it generates, so generator tuples suffice.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import series
from .abelian import FgAbelianGroup, cokernel
from .errors import ContextMismatch, ResourceCapError
from .hall import BasicCommutator, HallBasis, generate, witt
from .matrix import IntegerMatrix, LatticeSolver
from .words import FreeGroupWord

DEFAULT_BASIS_CAP = 10 ** 6


class NilpotentContext:
    """Shared immutable data for F/gamma_{class+1} on n generators."""

    def __init__(self, generator_count: int, nilpotency_class: int,
                 cap: int = DEFAULT_BASIS_CAP):
        if generator_count < 1 or nilpotency_class < 1:
            raise ValueError("need generator_count >= 1 and class >= 1")
        self.generator_count = generator_count
        self.nilpotency_class = nilpotency_class
        self.basis: HallBasis = generate(generator_count, nilpotency_class, cap=cap)
        self.elements: list[BasicCommutator] = self.basis.all_elements()
        self.index = {b: k for k, b in enumerate(self.elements)}
        self._lie_vectors: dict[BasicCommutator, series.Series] = {}
        self._group_series: dict[BasicCommutator, series.Series] = {}
        self._layer_solvers: dict[int, tuple[LatticeSolver, dict, list]] = {}

    def __eq__(self, other):
        return (isinstance(other, NilpotentContext)
                and self.generator_count == other.generator_count
                and self.nilpotency_class == other.nilpotency_class)

    def __hash__(self):
        return hash((self.generator_count, self.nilpotency_class))

    # -- cached algebraic data --------------------------------------------

    def lie_vector(self, b: BasicCommutator) -> series.Series:
        """Image of the bracket in the free Lie ring (iterated ab - ba)."""
        cached = self._lie_vectors.get(b)
        if cached is None:
            if b.is_leaf:
                cached = {(b.generator,): 1}
            else:
                cached = series.lie_mul(self.lie_vector(b.left),
                                        self.lie_vector(b.right),
                                        self.nilpotency_class)
            self._lie_vectors[b] = cached
        return cached

    def group_series(self, b: BasicCommutator) -> series.Series:
        """Series of the group element the bracket denotes."""
        cached = self._group_series.get(b)
        if cached is None:
            if b.is_leaf:
                cached = series.generator(b.generator)
            else:
                cached = series.group_commutator(self.group_series(b.left),
                                                 self.group_series(b.right),
                                                 self.nilpotency_class)
            self._group_series[b] = cached
        return cached

    def _layer_solver(self, w: int):
        """Solver expressing weight-w Lie elements over the Hall layer."""
        cached = self._layer_solvers.get(w)
        if cached is None:
            layer = self.basis.at_weight(w)
            monomials: dict[tuple[int, ...], int] = {}
            rows = []
            for b in layer:
                vec = self.lie_vector(b)
                row: dict[int, int] = {}
                for mono, coeff in vec.items():
                    col = monomials.setdefault(mono, len(monomials))
                    row[col] = coeff
                rows.append(row)
            width = len(monomials)
            dense = []
            for row in rows:
                vec = [0] * width
                for col, coeff in row.items():
                    vec[col] = coeff
                dense.append(vec)
            cached = (LatticeSolver(dense, width), monomials, list(layer))
            self._layer_solvers[w] = cached
        return cached

    # -- normalization ------------------------------------------------------

    def normalize(self, s: series.Series) -> "NilpotentElement":
        """Normal form of a group element given by its series image."""
        cap = self.nilpotency_class
        exps = [0] * len(self.elements)
        residual = dict(s)
        for w in range(1, cap + 1):
            part = series.degree_part(residual, w)
            if not part:
                continue
            solver, monomials, layer = self._layer_solver(w)
            target: dict[int, int] = {}
            for mono, coeff in part.items():
                col = monomials.get(mono)
                if col is None:
                    raise AssertionError(
                        f"degree-{w} part is not in the Lie layer (monomial {mono})")
                target[col] = coeff
            coords = solver.solve(target)
            if coords is None:
                raise AssertionError(f"degree-{w} part has no integer Hall coordinates")
            layer_series = series.unit()
            for b, e in zip(layer, coords):
                if e:
                    exps[self.index[b]] = e
                    layer_series = series.mul(
                        layer_series, series.power(self.group_series(b), e, cap), cap)
            residual = series.mul(series.inverse(layer_series, cap), residual, cap)
        if not series.is_unit_series(residual):
            raise AssertionError("normalization left a nonunit residual")
        return NilpotentElement(self, tuple(exps))

    def word_series(self, word: FreeGroupWord) -> series.Series:
        if word.max_generator() > self.generator_count:
            raise ValueError(
                f"word uses x{word.max_generator()}, context has "
                f"{self.generator_count} generators")
        cap = self.nilpotency_class
        out = series.unit()
        for gen, exp in word.syllables:
            out = series.mul(out, series.power(series.generator(gen), exp, cap), cap)
        return out

    def identity(self) -> "NilpotentElement":
        return NilpotentElement(self, (0,) * len(self.elements))

    def generator_element(self, i: int) -> "NilpotentElement":
        return self.element_series_form(series.generator(i))

    def element_series_form(self, s: series.Series) -> "NilpotentElement":
        return self.normalize(s)


@lru_cache(maxsize=None)
def get_context(generator_count: int, nilpotency_class: int,
                cap: int = DEFAULT_BASIS_CAP) -> NilpotentContext:
    return NilpotentContext(generator_count, nilpotency_class, cap=cap)


@dataclass(frozen=True)
class NilpotentElement:
    """Normal-form element: exponent vector over the context's Hall basis."""

    context: NilpotentContext
    exponents: tuple[int, ...]

    def __post_init__(self):
        if len(self.exponents) != len(self.context.elements):
            raise ValueError("exponent vector length mismatch")

    def _series(self) -> series.Series:
        cap = self.context.nilpotency_class
        out = series.unit()
        for b, e in zip(self.context.elements, self.exponents):
            if e:
                out = series.mul(out, series.power(self.context.group_series(b), e, cap),
                                 cap)
        return out

    def is_identity(self) -> bool:
        return all(e == 0 for e in self.exponents)

    def weight_block(self, w: int) -> tuple[int, ...]:
        """Exponents restricted to the weight-w basis layer."""
        offset = sum(witt(self.context.generator_count, k) for k in range(1, w))
        size = witt(self.context.generator_count, w)
        return self.exponents[offset:offset + size]

    def __str__(self):
        parts = [f"{b}" if e == 1 else f"{b}^{e}"
                 for b, e in zip(self.context.elements, self.exponents) if e]
        return " ".join(parts) if parts else "1"


def _check_contexts(a: NilpotentElement, b: NilpotentElement):
    if a.context != b.context:
        raise ContextMismatch(
            f"contexts differ: ({a.context.generator_count}, "
            f"{a.context.nilpotency_class}) vs ({b.context.generator_count}, "
            f"{b.context.nilpotency_class})")


def collect(word: FreeGroupWord, n: int, c: int,
            cap: int = DEFAULT_BASIS_CAP) -> NilpotentElement:
    """Normal form of a free-group word in F/gamma_{c+1} on n generators."""
    ctx = get_context(n, c, cap)
    return ctx.normalize(ctx.word_series(word))


def multiply(a: NilpotentElement, b: NilpotentElement) -> NilpotentElement:
    _check_contexts(a, b)
    cap = a.context.nilpotency_class
    return a.context.normalize(series.mul(a._series(), b._series(), cap))


def inverse(a: NilpotentElement) -> NilpotentElement:
    return a.context.normalize(series.inverse(a._series(), a.context.nilpotency_class))


def power(a: NilpotentElement, k: int) -> NilpotentElement:
    return a.context.normalize(series.power(a._series(), k, a.context.nilpotency_class))


def commutator(a: NilpotentElement, b: NilpotentElement) -> NilpotentElement:
    _check_contexts(a, b)
    cap = a.context.nilpotency_class
    return a.context.normalize(series.group_commutator(a._series(), b._series(), cap))


def bracket_expand(leaf_sequence: list[int], n: int, nilpotency_class: int,
                   cap: int = DEFAULT_BASIS_CAP) -> NilpotentElement:
    """Left-normed bracket [x_{i0}, x_{i1}, ...] collected in class ``nilpotency_class``.

    With sequence length equal to the class, the result is supported on the
    top weight layer only.
    """
    if not leaf_sequence:
        raise ValueError("empty bracket")
    if len(leaf_sequence) > nilpotency_class:
        raise ValueError("bracket longer than the nilpotency class")
    ctx = get_context(n, nilpotency_class, cap)
    current = ctx.word_series(FreeGroupWord.from_pairs(((leaf_sequence[0], 1),)))
    for leaf in leaf_sequence[1:]:
        nxt = ctx.word_series(FreeGroupWord.from_pairs(((leaf, 1),)))
        current = series.group_commutator(current, nxt, nilpotency_class)
    return ctx.normalize(current)


def nilpotent_multiplier_abelian(invariants: list[int], c: int,
                                 cap: int = DEFAULT_BASIS_CAP) -> FgAbelianGroup:
    """The class-c multiplier of the abelian group +Z/n_i (n_i = 0 meaning Z).

    Presenting the group on k generators with relator powers n_i, the
    multiplier is the free abelian weight-(c+1) layer modulo the lattice of
    rows n_i * [x_i, x_j1, ..., x_jc] over all generator tuples.
    """
    if not invariants:
        raise ValueError("need at least one cyclic order")
    if c < 1:
        raise ValueError("need c >= 1")
    k = len(invariants)
    for n_i in invariants:
        if n_i < 0:
            raise ValueError("cyclic orders must be >= 0")
    top_rank = witt(k, c + 1)
    if top_rank > cap:
        raise ResourceCapError(
            f"weight-{c + 1} layer on {k} generators has rank {top_rank}, over cap {cap}")
    if k == 1:
        return FgAbelianGroup.trivial()
    ctx = get_context(k, c + 1, cap)
    rows = set()
    for i in range(1, k + 1):
        n_i = invariants[i - 1]
        if n_i == 0:
            continue
        for tup in _tuples(k, c):
            elem = bracket_expand([i, *tup], k, c + 1, cap)
            row = tuple(n_i * e for e in elem.weight_block(c + 1))
            if any(row):
                rows.add(row)
    matrix = IntegerMatrix.from_rows(sorted(rows), top_rank)
    return cokernel(matrix)


def _tuples(k: int, c: int):
    if c == 0:
        yield ()
        return
    for tup in _tuples(k, c - 1):
        for j in range(1, k + 1):
            yield (*tup, j)


# -- class-2 unitriangular matrix oracle -------------------------------------


def _mat_mul3(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
                 for i in range(3))


_I3 = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
_E12 = ((1, 1, 0), (0, 1, 0), (0, 0, 1))
_E23 = ((1, 0, 0), (0, 1, 1), (0, 0, 1))


def _mat_pow3(m, k):
    if k < 0:
        # inverse of a unitriangular matrix: I - N + N^2 with N = m - I
        n = tuple(tuple(m[i][j] - _I3[i][j] for j in range(3)) for i in range(3))
        n2 = _mat_mul3(n, n)
        inv = tuple(tuple(_I3[i][j] - n[i][j] + n2[i][j] for j in range(3))
                    for i in range(3))
        return _mat_pow3(inv, -k)
    out = _I3
    base = m
    while k:
        if k & 1:
            out = _mat_mul3(out, base)
        k >>= 1
        if k:
            base = _mat_mul3(base, base)
    return out


def _class2_rep(n: int):
    """Faithful unitriangular representation of F/gamma_3 on n <= 3 generators.

    One 3x3 Heisenberg block per generator pair (i, j) with i > j; in block
    (i, j) the generator x_i acts as I+E12 and x_j as I+E23, so the basic
    commutator [x_i, x_j] lands on I+E13.  Exponent sums are visible inside
    the blocks for n >= 2; they are compared separately anyway.
    """
    pairs = [(i, j) for i in range(2, n + 1) for j in range(1, i)]

    def rep_letter(g: int):
        blocks = []
        for (i, j) in pairs:
            if g == i:
                blocks.append(_E12)
            elif g == j:
                blocks.append(_E23)
            else:
                blocks.append(_I3)
        return blocks

    return pairs, rep_letter


def matrix_oracle_check(word: FreeGroupWord) -> bool:
    """Compare class-2 collection against the unitriangular representation."""
    n = max(word.max_generator(), 1)
    if n > 3:
        raise ValueError("matrix oracle covers n <= 3 only")
    element = collect(word, n, 2)
    return _matrix_oracle_agrees(word, element)


def _matrix_oracle_agrees(word: FreeGroupWord, element: NilpotentElement) -> bool:
    n = element.context.generator_count
    pairs, rep_letter = _class2_rep(n)
    nblocks = len(pairs)

    def apply_word(blocks, w: FreeGroupWord):
        for g, e in w.syllables:
            letter = rep_letter(g)
            blocks = [_mat_mul3(b, _mat_pow3(letter[t], e))
                      for t, b in enumerate(blocks)]
        return blocks

    direct = apply_word([_I3] * nblocks, word)

    normal = [_I3] * nblocks
    for b, e in zip(element.context.elements, element.exponents):
        if not e:
            continue
        if b.is_leaf:
            letter = rep_letter(b.generator)
            normal = [_mat_mul3(m, _mat_pow3(letter[t], e))
                      for t, m in enumerate(normal)]
        else:
            i, j = b.left.generator, b.right.generator
            t = pairs.index((i, j))
            comm = tuple(tuple(_I3[r][s] + (e if (r, s) == (0, 2) else 0)
                               for s in range(3)) for r in range(3))
            normal[t] = _mat_mul3(normal[t], comm)

    if direct != normal:
        return False
    n_gens = element.context.generator_count
    return word.exponent_sums(n_gens) == list(element.exponents[:n_gens])
