"""Formula syntax tree, concrete grammar, parser, and printer.

The language has atoms, the falsum constant, negation, implication, and the
two coalition modalities ``K{...}`` (distributed knowledge) and ``H{...}``
(know-how).  Truth ``true`` is sugar for ``!false``; ``false`` is primitive.

Grammar (whitespace insignificant between tokens)::

    formula   := unary ("->" formula)?          # right associative
    unary     := "!" unary
               | "K" coalition unary
               | "H" coalition unary
               | atom
    atom      := "false" | "true" | ident | "(" formula ")"
    coalition := "{" (ident ("," ident)*)? "}"
    ident     := [A-Za-z_][A-Za-z0-9_']*
"""
from __future__ import annotations

import re
from dataclasses import dataclass

Coalition = frozenset[str]

EMPTY: Coalition = frozenset()


class FormulaSyntaxError(ValueError):
    """Parse failure, with the byte offset and the token set expected there."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        if self.expected:
            message = f"{message} at offset {offset}: expected {' or '.join(self.expected)}"
        else:
            message = f"{message} at offset {offset}"
        super().__init__(message)


class Formula:
    """Base class for formula nodes; trees are immutable and compare structurally."""

    def __str__(self) -> str:
        return format_formula(self)


def _cached_hash(self):
    # structural hashes are precomputed at construction; deep trees and memo
    # tables probe them constantly
    return self._h


@dataclass(frozen=True, repr=False)
class Falsum(Formula):
    __hash__ = _cached_hash

    def __post_init__(self):
        object.__setattr__(self, "_h", hash("Falsum"))

    def __repr__(self):
        return "Falsum()"


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str

    __hash__ = _cached_hash

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("Atom", self.name)))

    def __repr__(self):
        return f"Atom({self.name!r})"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    sub: Formula

    __hash__ = _cached_hash

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("Not", self.sub)))

    def __repr__(self):
        return f"Not({self.sub!r})"


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula

    __hash__ = _cached_hash

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("Implies", self.left, self.right)))

    def __repr__(self):
        return f"Implies({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Know(Formula):
    coalition: Coalition
    sub: Formula

    __hash__ = _cached_hash

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("Know", self.coalition, self.sub)))

    def __repr__(self):
        return f"Know({set(self.coalition) or '{}'}, {self.sub!r})"


@dataclass(frozen=True, repr=False)
class How(Formula):
    coalition: Coalition
    sub: Formula

    __hash__ = _cached_hash

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("How", self.coalition, self.sub)))

    def __repr__(self):
        return f"How({set(self.coalition) or '{}'}, {self.sub!r})"


#: ``true`` desugars to this node.
TOP = Not(Falsum())

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")

_KEYWORDS = {"true", "false"}

# token kinds
_ARROW, _BANG, _LBRACE, _RBRACE, _LPAREN, _RPAREN, _COMMA, _IDENT, _TRUE, _FALSE, _EOF = (
    "'->'", "'!'", "'{'", "'}'", "'('", "')'", "','", "identifier", "'true'", "'false'",
    "end of input",
)

_PUNCT = {
    "->": _ARROW,
    "!": _BANG,
    "{": _LBRACE,
    "}": _RBRACE,
    "(": _LPAREN,
    ")": _RPAREN,
    ",": _COMMA,
}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("->", i):
            tokens.append(_Token(_ARROW, "->", i))
            i += 2
            continue
        if ch in "!{}(),":
            tokens.append(_Token(_PUNCT[ch], ch, i))
            i += 1
            continue
        m = IDENT_RE.match(text, i)
        if m:
            word = m.group()
            if word == "true":
                tokens.append(_Token(_TRUE, word, i))
            elif word == "false":
                tokens.append(_Token(_FALSE, word, i))
            else:
                tokens.append(_Token(_IDENT, word, i))
            i = m.end()
            continue
        raise FormulaSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(_Token(_EOF, "", n))
    return tokens


_UNARY_START = (_BANG, _IDENT, _TRUE, _FALSE, _LPAREN)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise FormulaSyntaxError("syntax error", tok.offset, (kind,))
        return self.advance()

    def formula(self) -> Formula:
        left = self.unary()
        if self.peek().kind == _ARROW:
            self.advance()
            return Implies(left, self.formula())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == _BANG:
            self.advance()
            return Not(self.unary())
        if tok.kind == _IDENT and tok.text in ("K", "H") and self.peek(1).kind == _LBRACE:
            self.advance()
            coalition = self.coalition()
            sub = self.unary()
            return Know(coalition, sub) if tok.text == "K" else How(coalition, sub)
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == _FALSE:
            self.advance()
            return Falsum()
        if tok.kind == _TRUE:
            self.advance()
            return Not(Falsum())
        if tok.kind == _IDENT:
            self.advance()
            return Atom(tok.text)
        if tok.kind == _LPAREN:
            self.advance()
            inner = self.formula()
            self.expect(_RPAREN)
            return inner
        raise FormulaSyntaxError("syntax error", tok.offset, _UNARY_START)

    def coalition(self) -> Coalition:
        self.expect(_LBRACE)
        members: set[str] = set()
        if self.peek().kind == _RBRACE:
            self.advance()
            return frozenset()
        while True:
            tok = self.expect(_IDENT)
            if tok.text in members:
                raise FormulaSyntaxError(
                    f"duplicate agent {tok.text!r} in coalition", tok.offset)
            members.add(tok.text)
            tok = self.peek()
            if tok.kind == _COMMA:
                self.advance()
                continue
            if tok.kind == _RBRACE:
                self.advance()
                return frozenset(members)
            raise FormulaSyntaxError("syntax error", tok.offset, (_COMMA, _RBRACE))


def parse(text: str) -> Formula:
    """Parse ``text`` into a formula; raise FormulaSyntaxError on bad input."""
    parser = _Parser(text)
    f = parser.formula()
    tok = parser.peek()
    if tok.kind != _EOF:
        raise FormulaSyntaxError("syntax error", tok.offset, (_ARROW, _EOF))
    return f


def format_coalition(coalition: Coalition) -> str:
    return "{%s}" % ",".join(sorted(coalition))


def format_formula(f: Formula) -> str:
    """Print ``f`` with minimal parentheses; ``parse(format_formula(f)) == f``.

    Coalition members come out sorted; ``!false`` prints as ``true``.
    """
    return _fmt(f, top=True)


def _fmt(f: Formula, top: bool) -> str:
    # top=False means the formula sits in a unary slot, where a bare
    # implication would be misparsed and needs parentheses.
    if f == TOP:
        return "true"
    if isinstance(f, Falsum):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + _fmt(f.sub, top=False)
    if isinstance(f, Know):
        return "K" + format_coalition(f.coalition) + " " + _fmt(f.sub, top=False)
    if isinstance(f, How):
        return "H" + format_coalition(f.coalition) + " " + _fmt(f.sub, top=False)
    if isinstance(f, Implies):
        body = _fmt(f.left, top=False) + " -> " + _fmt(f.right, top=True)
        return body if top else "(" + body + ")"
    raise TypeError(f"not a formula: {f!r}")


def h_depth(f: Formula) -> int:
    """Maximum nesting of know-how operators along any root-to-leaf path."""
    if isinstance(f, (Falsum, Atom)):
        return 0
    if isinstance(f, Not):
        return h_depth(f.sub)
    if isinstance(f, Implies):
        return max(h_depth(f.left), h_depth(f.right))
    if isinstance(f, Know):
        return h_depth(f.sub)
    if isinstance(f, How):
        return 1 + h_depth(f.sub)
    raise TypeError(f"not a formula: {f!r}")


def uses_empty_coalition(f: Formula) -> bool:
    """True iff some K or H node in ``f`` carries the empty coalition."""
    if isinstance(f, (Falsum, Atom)):
        return False
    if isinstance(f, Not):
        return uses_empty_coalition(f.sub)
    if isinstance(f, Implies):
        return uses_empty_coalition(f.left) or uses_empty_coalition(f.right)
    if isinstance(f, (Know, How)):
        return not f.coalition or uses_empty_coalition(f.sub)
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f: Formula):
    """Yield every node of ``f`` (including ``f`` itself), parents first."""
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.sub)
    elif isinstance(f, Implies):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Know, How)):
        yield from subformulas(f.sub)
