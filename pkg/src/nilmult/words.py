"""Free group words and the shared word grammar.

Grammar::

    word      := term+
    term      := atom ('^' signed-integer)?
    atom      := generator | '[' word ',' word ']'
    generator := 'x' digits | identifier

``parse_word`` keeps brackets structural (a ``WordExpr``); engines that need a
flat word expand them with ``[u, v] = u^-1 v^-1 u v`` via ``to_free_word``.
Printing a normalized expression and re-parsing gives the expression back.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import ParseError

Atom = Union[str, tuple["WordExpr", "WordExpr"]]


@dataclass(frozen=True)
class FreeGroupWord:
    """Freely reduced word as (generator index, nonzero exponent) pairs."""

    syllables: tuple[tuple[int, int], ...]

    @classmethod
    def from_pairs(cls, pairs) -> "FreeGroupWord":
        stack: list[list[int]] = []
        for gen, exp in pairs:
            gen, exp = int(gen), int(exp)
            if gen < 1:
                raise ValueError(f"generator index {gen} < 1")
            if exp == 0:
                continue
            if stack and stack[-1][0] == gen:
                stack[-1][1] += exp
                if stack[-1][1] == 0:
                    stack.pop()
            else:
                stack.append([gen, exp])
        return cls(tuple((g, e) for g, e in stack))

    def __mul__(self, other: "FreeGroupWord") -> "FreeGroupWord":
        return FreeGroupWord.from_pairs(self.syllables + other.syllables)

    def inverse(self) -> "FreeGroupWord":
        return FreeGroupWord.from_pairs(
            tuple((g, -e) for g, e in reversed(self.syllables)))

    def power(self, k: int) -> "FreeGroupWord":
        if k == 0:
            return FreeGroupWord(())
        base = self if k > 0 else self.inverse()
        out = FreeGroupWord(())
        for _ in range(abs(k)):
            out = out * base
        return out

    def is_identity(self) -> bool:
        return not self.syllables

    def max_generator(self) -> int:
        return max((g for g, _ in self.syllables), default=0)

    def exponent_sums(self, n: int) -> list[int]:
        sums = [0] * n
        for g, e in self.syllables:
            if g > n:
                raise ValueError(f"generator x{g} out of range 1..{n}")
            sums[g - 1] += e
        return sums

    def to_text(self) -> str:
        parts = []
        for g, e in self.syllables:
            parts.append(f"x{g}" if e == 1 else f"x{g}^{e}")
        return " ".join(parts)

    def __str__(self):
        return self.to_text() if self.syllables else "1"


def commutator_word(u: FreeGroupWord, v: FreeGroupWord) -> FreeGroupWord:
    """[u, v] = u^-1 v^-1 u v."""
    return u.inverse() * v.inverse() * u * v


@dataclass(frozen=True)
class WordExpr:
    """Parsed word with brackets kept structural: ((atom, exponent), ...)."""

    terms: tuple[tuple[Atom, int], ...]

    def normalized(self) -> "WordExpr":
        stack: list[list] = []
        for atom, exp in self.terms:
            if isinstance(atom, tuple):
                atom = (atom[0].normalized(), atom[1].normalized())
            if exp == 0:
                continue
            if stack and stack[-1][0] == atom:
                stack[-1][1] += exp
                if stack[-1][1] == 0:
                    stack.pop()
            else:
                stack.append([atom, exp])
        return WordExpr(tuple((a, e) for a, e in stack))

    def generator_names(self) -> list[str]:
        """Distinct generator names in first-appearance order."""
        seen: list[str] = []

        def walk(expr: "WordExpr"):
            for atom, _ in expr.terms:
                if isinstance(atom, str):
                    if atom not in seen:
                        seen.append(atom)
                else:
                    walk(atom[0])
                    walk(atom[1])

        walk(self)
        return seen

    def to_free_word(self, names: Sequence[str] | None = None) -> FreeGroupWord:
        """Expand brackets and resolve generator names to indices (from 1).

        With ``names`` given, indices follow that list; otherwise generators
        must be of the form ``x<digits>`` and the digits are the index.
        """

        def resolve(name: str) -> int:
            if names is not None:
                try:
                    return names.index(name) + 1
                except ValueError:
                    raise ValueError(f"unknown generator {name!r}") from None
            m = re.fullmatch(r"x([0-9]+)", name)
            if not m or int(m.group(1)) < 1:
                raise ValueError(f"generator {name!r} is not of the form x<digits>")
            return int(m.group(1))

        out = FreeGroupWord(())
        for atom, exp in self.terms:
            if isinstance(atom, str):
                piece = FreeGroupWord.from_pairs(((resolve(atom), 1),))
            else:
                piece = commutator_word(atom[0].to_free_word(names),
                                        atom[1].to_free_word(names))
            out = out * piece.power(exp)
        return out

    def to_text(self) -> str:
        parts = []
        for atom, exp in self.terms:
            if isinstance(atom, str):
                body = atom
            else:
                body = f"[{atom[0].to_text()},{atom[1].to_text()}]"
            parts.append(body if exp == 1 else f"{body}^{exp}")
        return " ".join(parts)

    def __str__(self):
        return self.to_text() if self.terms else "1"


_TOKEN_RE = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
                       r"|(?P<caret>\^)|(?P<int>-?[0-9]+)"
                       r"|(?P<lbrack>\[)|(?P<rbrack>\])|(?P<comma>,))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == m.start():
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ParseError(f"unexpected character {text[at]!r}", at,
                             ("generator", "'['",))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, kind: str, expected: tuple[str, ...]):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text), expected)
        if tok[0] != kind:
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2], expected)
        self.i += 1
        return tok

    def word(self, stop_kinds: tuple[str, ...]) -> WordExpr:
        terms = []
        while True:
            tok = self.peek()
            if tok is None or tok[0] in stop_kinds:
                break
            terms.append(self.term())
        if not terms:
            tok = self.peek()
            pos = tok[2] if tok else len(self.text)
            raise ParseError("empty word", pos, ("generator", "'['"))
        return WordExpr(tuple(terms))

    def term(self) -> tuple[Atom, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text),
                             ("generator", "'['"))
        if tok[0] == "name":
            self.i += 1
            atom: Atom = tok[1]
        elif tok[0] == "lbrack":
            self.i += 1
            left = self.word(("comma",))
            self.take("comma", ("','",))
            right = self.word(("rbrack",))
            self.take("rbrack", ("']'",))
            atom = (left, right)
        else:
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2],
                             ("generator", "'['"))
        exp = 1
        nxt = self.peek()
        if nxt is not None and nxt[0] == "caret":
            self.i += 1
            itok = self.take("int", ("integer",))
            exp = int(itok[1])
        return (atom, exp)


def parse_word(text: str) -> WordExpr:
    """Parse a word in the shared grammar; brackets stay structural."""
    parser = _Parser(text)
    expr = parser.word(stop_kinds=())
    if parser.peek() is not None:
        tok = parser.peek()
        raise ParseError(f"unexpected token {tok[1]!r}", tok[2], ("end of input",))
    return expr.normalized()


def format_word(expr: WordExpr) -> str:
    return expr.to_text()
