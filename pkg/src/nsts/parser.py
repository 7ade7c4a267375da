"""Reader for the clause language.

    program  := (clause '.')*
    clause   := term (':-' term (',' term)*)?
    term     := atom | variable | integer | atom '(' term (',' term)* ')'

Identifiers starting with an uppercase letter or ``_`` are variables; a lone
``_`` is anonymous (fresh at each occurrence).  ``%`` starts a line comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from .terms import Clause, Compound, Const, Program, Term, Var, fresh_ids, key_of, variables

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<neck>:-)
  | (?P<int>-?\d+)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<atom>\$?[a-z][A-Za-z0-9_]*)
  | (?P<punct>[(),.])
  | (?P<query>\?-)
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Reader:
    def __init__(self, text: str, ids: Optional[Iterator[int]] = None):
        self.toks = _tokenize(text)
        self.i = 0
        self.ids = ids if ids is not None else fresh_ids()
        self.scope: Dict[str, Var] = {}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        where = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"{msg} (found {where})", tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind not in ("punct", "neck"):
            self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def var(self, name: str) -> Var:
        if name == "_":
            return Var("_", next(self.ids))
        v = self.scope.get(name)
        if v is None:
            v = self.scope[name] = Var(name, next(self.ids))
        return v

    def term(self) -> Term:
        t = self.tok
        if t.kind == "var":
            self.i += 1
            return self.var(t.text)
        if t.kind == "int":
            self.i += 1
            return Const(int(t.text))
        if t.kind == "atom":
            self.i += 1
            if self.tok.text == "(" and self.tok.kind == "punct":
                self.i += 1
                args = [self.term()]
                while self.tok.text == ",":
                    self.i += 1
                    args.append(self.term())
                self.expect(")")
                return Compound(t.text, tuple(args))
            return Const(t.text)
        self.error("expected a term")

    def clause(self) -> Clause:
        self.scope = {}
        start = self.tok
        head = self.term()
        if key_of(head) is None:
            self.error("clause head must be an atom or compound term", start)
        body = []
        if self.tok.kind == "neck":
            self.i += 1
            body.append(self.term())
            while self.tok.text == "," and self.tok.kind == "punct":
                self.i += 1
                body.append(self.term())
            if self.tok.kind == "neck":
                self.error("duplicate ':-' in clause")
        self.expect(".")
        return Clause(head, tuple(body))


def parse_program(text: str, externals=None) -> Program:
    """Parse program text; clause order follows the source."""
    r = _Reader(text)
    clauses = []
    while r.tok.kind != "eof":
        clauses.append(r.clause())
    return Program(tuple(clauses), externals or {})


def parse_query(text: str) -> Tuple[Term, ...]:
    """Parse ``[?-] goal, goal, ... [.]``; variables are shared across goals."""
    r = _Reader(text)
    if r.tok.kind == "query":
        r.i += 1
    goals = [r.term()]
    while r.tok.text == "," and r.tok.kind == "punct":
        r.i += 1
        goals.append(r.term())
    if r.tok.text == ".":
        r.i += 1
    if r.tok.kind != "eof":
        r.error("unexpected trailing input")
    return tuple(goals)


def parse_term(text: str, scope: Optional[Dict[str, Var]] = None) -> Term:
    """Parse one term.  Passing ``scope`` shares named variables across calls."""
    r = _Reader(text)
    if scope is not None:
        r.scope = scope
    t = r.term()
    if r.tok.kind != "eof":
        r.error("unexpected trailing input")
    return t


def query_variables(goals) -> List[Var]:
    """Named (non-anonymous) variables of a query, in order of first occurrence."""
    out: List[Var] = []
    for g in goals:
        for v in variables(g):
            if v.name != "_" and v not in out:
                out.append(v)
    return out
