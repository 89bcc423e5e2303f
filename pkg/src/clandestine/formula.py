"""Formulas of the clandestine-operations language.

The abstract syntax has five constructors: :class:`Var`, :class:`Neg`,
:class:`Imp`, :class:`Know` (distributed knowledge ``K{C}``) and :class:`Can`
(clandestine power ``H{C}``).  The concrete syntax accepted by
:func:`parse_formula` is::

    formula := disj ( "->" formula )?          right associative
    disj    := conj ( "|" conj )*              left associative
    conj    := unary ( "&" unary )*            left associative
    unary   := "!" unary | "K{" agents "}" unary | "H{" agents "}" unary | atom
    atom    := identifier | "true" | "false" | "(" formula ")"
    agents  := ( identifier ( "," identifier )* )?

``a | b`` is read as ``!a -> b`` and ``a & b`` as ``!(a -> !b)``.  The
constants are built over a reserved variable: ``true`` is ``z0 -> z0`` and
``false`` is ``!(z0 -> z0)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

__all__ = [
    "Var", "Neg", "Imp", "Know", "Can", "Formula", "Coalition",
    "TRUE", "FALSE", "RESERVED_VAR", "FormulaSyntaxError",
    "coalition", "parse_formula", "print_formula", "modal_atoms",
    "disj", "conj", "subformulas", "agents_of", "variables_of", "depth",
    "is_identifier",
]

Coalition = frozenset
RESERVED_VAR = "z0"
RESERVED_WORDS = frozenset({"true", "false"})
# K and H open modal prefixes, so they cannot name variables.
_KEYWORDS = RESERVED_WORDS | {"K", "H"}
_IDENT = re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*")


def is_identifier(name: str) -> bool:
    return bool(_IDENT.fullmatch(name)) and name not in RESERVED_WORDS


def coalition(members: Iterable[str] = ()) -> frozenset:
    """Build a coalition, rejecting malformed agent names."""
    if isinstance(members, str):
        raise TypeError("coalition members must be an iterable of names, not a string")
    out = frozenset(members)
    for name in out:
        if not isinstance(name, str) or not is_identifier(name):
            raise ValueError(f"invalid agent name {name!r}")
    return out


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Neg:
    body: "Formula"

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Imp:
    lhs: "Formula"
    rhs: "Formula"

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Know:
    coalition: frozenset
    body: "Formula"

    def __post_init__(self):
        if not isinstance(self.coalition, frozenset):
            object.__setattr__(self, "coalition", coalition(self.coalition))

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Can:
    coalition: frozenset
    body: "Formula"

    def __post_init__(self):
        if not isinstance(self.coalition, frozenset):
            object.__setattr__(self, "coalition", coalition(self.coalition))

    def __str__(self) -> str:
        return print_formula(self)


Formula = Union[Var, Neg, Imp, Know, Can]

TRUE = Imp(Var(RESERVED_VAR), Var(RESERVED_VAR))
FALSE = Neg(TRUE)


def disj(a: Formula, b: Formula) -> Formula:
    return Imp(Neg(a), b)


def conj(a: Formula, b: Formula) -> Formula:
    return Neg(Imp(a, Neg(b)))


class FormulaSyntaxError(ValueError):
    """Malformed formula text; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


# -- lexer -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<punct>[!&|(){},])|(?P<ident>[a-zA-Z_][a-zA-Z0-9_]*))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok=None):
        tok = tok or self.peek()
        found = tok[1] if tok[0] != "eof" else "end of input"
        raise FormulaSyntaxError(f"{message}, found {found!r}", tok[2], self.text)

    def expect(self, value: str):
        tok = self.peek()
        if tok[1] != value or tok[0] == "ident":
            self.error(f"expected {value!r}")
        return self.advance()

    def parse(self) -> Formula:
        f = self.formula()
        if self.peek()[0] != "eof":
            self.error("unexpected trailing input")
        return f

    def formula(self) -> Formula:
        lhs = self.disjunction()
        if self.peek()[0] == "arrow":
            self.advance()
            return Imp(lhs, self.formula())
        return lhs

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[1] == "|":
            self.advance()
            f = disj(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek()[1] == "&":
            self.advance()
            f = conj(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, value, _ = self.peek()
        if kind == "punct" and value == "!":
            self.advance()
            return Neg(self.unary())
        if kind == "ident" and value in ("K", "H"):
            self.advance()
            members = self.agents()
            body = self.unary()
            return Know(members, body) if value == "K" else Can(members, body)
        return self.atom()

    def agents(self) -> frozenset:
        self.expect("{")
        names = []
        if self.peek()[1] != "}":
            while True:
                tok = self.advance()
                if tok[0] != "ident":
                    self.error("expected agent name", tok)
                if tok[1] in RESERVED_WORDS:
                    raise FormulaSyntaxError(
                        f"reserved word {tok[1]!r} used as agent name", tok[2], self.text)
                names.append(tok[1])
                if self.peek()[1] != ",":
                    break
                self.advance()
        self.expect("}")
        return frozenset(names)

    def atom(self) -> Formula:
        tok = self.advance()
        kind, value, pos = tok
        if kind == "ident":
            if value == "true":
                return TRUE
            if value == "false":
                return FALSE
            if value in _KEYWORDS or value == RESERVED_VAR:
                raise FormulaSyntaxError(
                    f"reserved word {value!r} used as variable", pos, self.text)
            return Var(value)
        if value == "(":
            f = self.formula()
            self.expect(")")
            return f
        self.error("expected a formula", tok)


def parse_formula(text: str) -> Formula:
    """Parse formula text into an AST.

    >>> parse_formula("p -> q -> r") == Imp(Var("p"), Imp(Var("q"), Var("r")))
    True
    """
    return _Parser(text).parse()


# -- printer ---------------------------------------------------------------

def _coalition_text(c: frozenset) -> str:
    return "{" + ",".join(sorted(c)) + "}"


def print_formula(f: Formula) -> str:
    """Canonical text of ``f`` with the fewest parentheses the grammar needs."""
    if f == TRUE:
        return "true"
    if f == FALSE:
        return "false"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Imp):
        return f"{_operand(f.lhs)} -> {print_formula(f.rhs)}"
    if isinstance(f, Neg):
        return "!" + _operand(f.body)
    if isinstance(f, Know):
        return f"K{_coalition_text(f.coalition)} {_operand(f.body)}"
    if isinstance(f, Can):
        return f"H{_coalition_text(f.coalition)} {_operand(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def _operand(f: Formula) -> str:
    text = print_formula(f)
    if isinstance(f, Imp) and f != TRUE:
        return f"({text})"
    return text


# -- traversals ------------------------------------------------------------

def modal_atoms(f: Formula) -> list[Formula]:
    """Maximal subformulas headed by Var, Know or Can, in first-occurrence order."""
    seen: dict[Formula, None] = {}

    def walk(g: Formula):
        if isinstance(g, Neg):
            walk(g.body)
        elif isinstance(g, Imp):
            walk(g.lhs)
            walk(g.rhs)
        else:
            seen.setdefault(g, None)

    walk(f)
    return list(seen)


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order walk over every node of ``f``."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, Imp):
            stack.append(g.rhs)
            stack.append(g.lhs)
        elif not isinstance(g, Var):
            stack.append(g.body)


def agents_of(f: Formula) -> frozenset:
    out: set[str] = set()
    for g in subformulas(f):
        if isinstance(g, (Know, Can)):
            out |= g.coalition
    return frozenset(out)


def variables_of(f: Formula) -> frozenset:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Var))


def depth(f: Formula) -> int:
    if isinstance(f, Var):
        return 0
    if isinstance(f, Imp):
        return 1 + max(depth(f.lhs), depth(f.rhs))
    return 1 + depth(f.body)
