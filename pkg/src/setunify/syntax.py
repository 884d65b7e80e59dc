"""Concrete syntax for set terms, equations and systems.

    term     := sum
    sum      := primary { ("+" | "un") primary }
    primary  := VAR | SYM | SYM "(" term {"," term} ")" | set | "empty"
    set      := "{" "}" | "{" term {"," term} ["|" term] "}"
    equation := term "=" term
    system   := equation {(";" | NEWLINE) equation}

``#`` starts a comment.  Identifiers starting with an uppercase letter or
``_`` are variables; lowercase identifiers and integer literals are
symbols.  ``{t1, ..., tn | r}`` is an insertion chain ending in ``r``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import IllTypedUnion, ParseError, StyleUnavailable
from .terms import (EMPTY, Equation, Kind, Term, Var, app, const, insert_elements,
                    is_set_constructed, set_of, union_of, FRESH_RE)

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<sym>[a-z][A-Za-z0-9_]*|[0-9]+)
  | (?P<punct>[{}()|,;=+])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    pos: int
    line: int
    col: int


def _tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    depth = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok_text = m.group()
        col = pos - line_start + 1
        if kind == "nl":
            if depth == 0:
                tokens.append(Token("nl", tok_text, pos, line, col))
            line += 1
            line_start = m.end()
        elif kind in ("var", "sym", "punct"):
            if kind == "punct":
                kind = tok_text
                if tok_text in "{(":
                    depth += 1
                elif tok_text in "})":
                    depth = max(0, depth - 1)
            elif kind == "sym" and tok_text == "un":
                kind = "+"
            tokens.append(Token(kind, tok_text, pos, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", pos, line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text or "newline")
        raise ParseError(f"{msg}, found {found}", tok.line, tok.col)

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.error(f"expected {kind!r}")
        tok = self.tok
        self.i += 1
        return tok

    def skip_newlines(self):
        while self.tok.kind == "nl":
            self.i += 1

    def term(self) -> Term:
        parts = [self.primary()]
        while self.tok.kind == "+":
            self.i += 1
            self.skip_newlines()
            parts.append(self.primary())
        return parts[0] if len(parts) == 1 else union_of(parts)

    def primary(self) -> Term:
        tok = self.tok
        if tok.kind == "var":
            if FRESH_RE.match(tok.text):
                self.error("names of the form _N<k> are reserved for solver variables")
            self.i += 1
            return Var(tok.text)
        if tok.kind == "sym":
            self.i += 1
            if tok.text == "empty":
                return EMPTY
            if self.tok.kind == "(":
                self.i += 1
                args = [self.term()]
                while self.tok.kind == ",":
                    self.i += 1
                    args.append(self.term())
                self.expect(")")
                return app(tok.text, *args)
            return const(tok.text)
        if tok.kind == "{":
            self.i += 1
            if self.tok.kind == "}":
                self.i += 1
                return EMPTY
            elems = [self.term()]
            while self.tok.kind == ",":
                self.i += 1
                elems.append(self.term())
            rest = EMPTY
            if self.tok.kind == "|":
                self.i += 1
                rest = self.term()
            self.expect("}")
            return set_of(elems, rest)
        if tok.kind == "(":
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        self.error("expected a term")

    def equation(self) -> tuple[Equation, tuple[int, int], tuple[int, int]]:
        start = self.tok.pos
        lhs = self.term()
        lhs_span = (start, self.tokens[self.i - 1].pos + len(self.tokens[self.i - 1].text))
        self.expect("=")
        self.skip_newlines()
        start = self.tok.pos
        rhs = self.term()
        rhs_span = (start, self.tokens[self.i - 1].pos + len(self.tokens[self.i - 1].text))
        return Equation(lhs, rhs), lhs_span, rhs_span


def check_well_typed(t: Term) -> None:
    """Reject individuals in set positions anywhere inside ``t``."""
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            continue
        k = u.sym.kind
        if k is Kind.UNION:
            for a in u.args:
                if not (isinstance(a, Var) or is_set_constructed(a)):
                    raise IllTypedUnion(f"union argument {print_term(a)} is an individual")
        elif k is Kind.INSERT:
            r = u.args[1]
            if not (isinstance(r, Var) or is_set_constructed(r)):
                raise IllTypedUnion(f"insertion tail {print_term(r)} is an individual")
        stack.extend(u.args)


def parse_term(text: str, typed: bool = True) -> Term:
    """Parse one term; ``typed=False`` skips the set-position check."""
    p = _Parser(text)
    p.skip_newlines()
    t = p.term()
    p.skip_newlines()
    if p.tok.kind != "eof":
        p.error("unexpected trailing input")
    if typed:
        check_well_typed(t)
    return t


@dataclass
class SourceSystem:
    equations: list[tuple[tuple[int, int], tuple[int, int], Equation]] = field(default_factory=list)
    origin: str = "<string>"

    @property
    def system(self) -> tuple[Equation, ...]:
        return tuple(e for _, _, e in self.equations)


def parse_source(text: str, origin: str = "<string>", typed: bool = True) -> SourceSystem:
    p = _Parser(text)
    out = SourceSystem(origin=origin)
    while True:
        while p.tok.kind in ("nl", ";"):
            p.i += 1
        if p.tok.kind == "eof":
            break
        eq, lspan, rspan = p.equation()
        if typed:
            check_well_typed(eq.lhs)
            check_well_typed(eq.rhs)
        out.equations.append((lspan, rspan, eq))
        if p.tok.kind not in ("nl", ";", "eof"):
            p.error("expected ';' or newline between equations")
    return out


def parse_system(text: str, typed: bool = True) -> tuple[Equation, ...]:
    return parse_source(text, typed=typed).system


def parse_equation(text: str, typed: bool = True) -> Equation:
    eqs = parse_system(text, typed)
    if len(eqs) != 1:
        raise ParseError(f"expected exactly one equation, got {len(eqs)}", 1, 1)
    return eqs[0]


# -- printing -------------------------------------------------------------------

def _collect(t: Term, elems: list, tails: list, raw: list):
    """Split a set term into element terms, variable summands and leftovers."""
    if isinstance(t, Var):
        tails.append(t)
        return
    k = t.sym.kind
    if k is Kind.EMPTY:
        return
    if k is Kind.SINGLETON:
        elems.append(t.args[0])
    elif k is Kind.INSERT:
        chain, rest = insert_elements(t)
        elems.extend(chain)
        _collect(rest, elems, tails, raw)
    elif k is Kind.UNION:
        for a in t.args:
            _collect(a, elems, tails, raw)
    else:
        raw.append(t)


def print_term(t: Term, style: str = "list") -> str:
    """Render ``t``; ``style`` is ``"list"`` (``{a, b | X}``) or ``"union"``.

    List style needs at most one set variable in every set subterm.
    """
    if style not in ("list", "union"):
        raise ValueError(f"unknown style {style!r}")
    if isinstance(t, Var):
        return t.name
    if t.sym.kind is Kind.FREE:
        if not t.args:
            return t.sym.name
        return f"{t.sym.name}({', '.join(print_term(a, style) for a in t.args)})"
    elems: list = []
    tails: list = []
    raw: list = []
    _collect(t, elems, tails, raw)
    tails = list(dict.fromkeys(tails))
    inner = ", ".join(print_term(e, style) for e in elems)
    if style == "list":
        if raw or len(tails) > 1:
            raise StyleUnavailable(
                f"{print_term(t, 'union')} needs the union constructor")
        if tails:
            return f"{{{inner} | {tails[0].name}}}" if elems else tails[0].name
        return f"{{{inner}}}"
    parts = []
    if elems:
        parts.append(f"{{{inner}}}")
    parts.extend(x.name for x in tails)
    parts.extend(print_term(r, style) for r in raw)
    return " + ".join(parts) if parts else "{}"


def print_equation(e, style: str = "list") -> str:
    l, r = e
    return f"{print_term(l, style)} = {print_term(r, style)}"


def print_best(t: Term) -> str:
    """List style when available, union style otherwise."""
    try:
        return print_term(t, "list")
    except StyleUnavailable:
        return print_term(t, "union")
