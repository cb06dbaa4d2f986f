"""Recursive-descent parser and sort checker for the formula text format.

Grammar (loosest binding first)::

    formula := quant | iff
    iff     := imp ("<->" imp)*
    imp     := or ("->" imp)?            # right associative
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary | quant | atom | "(" formula ")"
    quant   := ("A"|"E") var "." formula
             | "E=" INT var "." formula | "E<=" INT var "." formula
    atom    := "adj(" t "," t ")" | "inc(" t "," t ")" | t "=" t | t "in" SET
             | "true" | "false"

A quantifier body extends as far right as possible. Lowercase names are
vertex elements and uppercase names vertex sets unless a ``^V``, ``^VS``,
``^E`` or ``^ES`` suffix says otherwise. An optional ``free: X^VS, y`` header
line declares free variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    Adj,
    And,
    Const,
    Count,
    Dialect,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    In,
    Inc,
    Node,
    Not,
    Or,
    Sort,
    Var,
    children,
    default_sort,
)


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        self.pos = pos
        super().__init__(f"{message} at position {pos}")


class FormulaSortError(ValueError):
    pass


_SUFFIX = {"V": Sort.VERTEX, "VS": Sort.VERTEX_SET, "E": Sort.EDGE, "ES": Sort.EDGE_SET}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:\^(?:VS|V|ES|E)\b)?)
  | (?P<int>\d+)
  | (?P<op><->|->|<=|[()~&|=.,])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str, offset: int = 0) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos + offset)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), pos + offset))
        pos = m.end()
    tokens.append(Token("eof", "", len(text) + offset))
    return tokens


def _split_ident(text: str) -> tuple[str, Sort | None]:
    if "^" in text:
        name, suf = text.split("^", 1)
        return name, _SUFFIX[suf]
    return text, None


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.cur
        if tok.text != text:
            raise FormulaSyntaxError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.advance()

    # -- grammar --

    def formula(self) -> Node:
        return self.iff()

    def iff(self) -> Node:
        left = self.imp()
        while self.cur.text == "<->":
            self.advance()
            left = Iff(left, self.imp())
        return left

    def imp(self) -> Node:
        left = self.or_()
        if self.cur.text == "->":
            self.advance()
            return Implies(left, self.imp())
        return left

    def or_(self) -> Node:
        args = [self.and_()]
        while self.cur.text == "|":
            self.advance()
            args.append(self.and_())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def and_(self) -> Node:
        args = [self.unary()]
        while self.cur.text == "&":
            self.advance()
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self) -> Node:
        tok = self.cur
        if tok.text == "~":
            self.advance()
            return Not(self.unary())
        if tok.text == "(":
            self.advance()
            inner = self.formula()
            self.expect(")")
            return inner
        if tok.kind == "ident" and tok.text[:1] in ("A", "E"):
            return self.quant()
        return self.atom()

    def _var(self, tok: Token) -> Var:
        name, sort = _split_ident(tok.text)
        return Var(name, sort or default_sort(name))

    def quant(self) -> Node:
        tok = self.advance()
        head = tok.text
        if head == "E" and self.cur.text in ("=", "<="):
            op = self.advance().text
            num = self.cur
            if num.kind != "int":
                raise FormulaSyntaxError("expected count after E" + op, num.pos)
            self.advance()
            vtok = self.cur
            if vtok.kind != "ident":
                raise FormulaSyntaxError("expected variable", vtok.pos)
            self.advance()
            self.expect(".")
            return Count(op, int(num.text), self._var(vtok), self.formula())
        kind = head[0]
        if head in ("A", "E"):
            vtok = self.cur
            if vtok.kind != "ident":
                raise FormulaSyntaxError("expected variable after quantifier", vtok.pos)
            self.advance()
            var = self._var(vtok)
        elif head[0] in "AE" and len(head) > 1 and head[1] != "^":
            var = self._var(Token("ident", head[1:], tok.pos + 1))
        else:
            raise FormulaSyntaxError(f"unexpected identifier {head!r}", tok.pos)
        self.expect(".")
        body = self.formula()
        return Forall(var, body) if kind == "A" else Exists(var, body)

    def _term(self) -> str:
        tok = self.cur
        if tok.kind != "ident" or "^" in tok.text:
            raise FormulaSyntaxError(f"expected a variable, found {tok.text or 'end of input'!r}", tok.pos)
        self.advance()
        return tok.text

    def atom(self) -> Node:
        tok = self.cur
        if tok.kind == "ident" and tok.text in ("true", "false"):
            self.advance()
            return Const(tok.text == "true")
        if tok.kind == "ident" and tok.text in ("adj", "inc") and self.peek().text == "(":
            self.advance()
            self.advance()
            a = self._term()
            self.expect(",")
            b = self._term()
            self.expect(")")
            return Adj(a, b) if tok.text == "adj" else Inc(a, b)
        if tok.kind != "ident":
            raise FormulaSyntaxError(f"unexpected {tok.text or 'end of input'!r}", tok.pos)
        a = self._term()
        if self.cur.text == "=":
            self.advance()
            return Eq(a, self._term())
        if self.cur.kind == "ident" and self.cur.text == "in":
            self.advance()
            return In(a, self._term())
        raise FormulaSyntaxError("expected '=' or 'in' after term", self.cur.pos)


def _parse_free(line: str, offset: int) -> tuple[Var, ...]:
    out = []
    for part in line.split(","):
        part = part.strip()
        if not part:
            continue
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*(\^(VS|V|ES|E))?", part):
            raise FormulaSyntaxError(f"bad free-variable declaration {part!r}", offset)
        name, sort = _split_ident(part)
        out.append(Var(name, sort or default_sort(name)))
    names = [v.name for v in out]
    if len(set(names)) != len(names):
        raise FormulaSortError("duplicate free variable")
    return tuple(out)


def parse_formula(text: str, free: tuple[Var, ...] | None = None) -> Formula:
    """Parse and sort-check ``text``; see the module docstring for the format."""
    declared: tuple[Var, ...] = tuple(free or ())
    body_lines = []
    offset = 0
    body_offset = None
    for raw in text.splitlines(keepends=True):
        stripped = raw.strip()
        if stripped.startswith("#") or (not stripped and body_offset is None):
            offset += len(raw)
            continue
        if stripped.startswith("free:") and body_offset is None:
            declared = declared + _parse_free(stripped[len("free:"):], offset)
            offset += len(raw)
            continue
        if body_offset is None:
            body_offset = offset
        body_lines.append(raw)
        offset += len(raw)
    body = "".join(body_lines)
    parser = _Parser(_tokenize(body, body_offset or 0))
    if parser.cur.kind == "eof":
        raise FormulaSyntaxError("empty formula", parser.cur.pos)
    root = parser.formula()
    if parser.cur.kind != "eof":
        raise FormulaSyntaxError(f"unexpected {parser.cur.text!r}", parser.cur.pos)
    return check_formula(root, declared)


def check_formula(root: Node, free: tuple[Var, ...] = ()) -> Formula:
    """Sort-check ``root`` against ``free`` and detect its dialect."""
    scope = {v.name: v.sort for v in free}
    if len(scope) != len(free):
        raise FormulaSortError("duplicate free variable")
    flags = {"edge": any(v.sort.is_edge for v in free), "set": False}
    _check(root, scope, flags)
    if flags["edge"]:
        dialect = Dialect.MSO2
    elif flags["set"]:
        dialect = Dialect.MSO1
    else:
        dialect = Dialect.FO
    return Formula(root, tuple(free), dialect)


def _lookup(scope: dict, name: str) -> Sort:
    try:
        return scope[name]
    except KeyError:
        raise FormulaSortError(f"unbound variable {name!r} not declared free") from None


def _check(node: Node, scope: dict, flags: dict) -> None:
    if isinstance(node, Adj):
        for t in (node.a, node.b):
            if _lookup(scope, t) is not Sort.VERTEX:
                raise FormulaSortError(f"adj expects vertex terms, {t!r} is {scope[t].name}")
    elif isinstance(node, Inc):
        if _lookup(scope, node.v) is not Sort.VERTEX:
            raise FormulaSortError(f"inc expects a vertex first, {node.v!r} is {scope[node.v].name}")
        if _lookup(scope, node.e) is not Sort.EDGE:
            raise FormulaSortError(f"inc expects an edge second, {node.e!r} is {scope[node.e].name}")
    elif isinstance(node, Eq):
        sa, sb = _lookup(scope, node.a), _lookup(scope, node.b)
        if sa is not sb or sa.is_set:
            raise FormulaSortError(f"cannot compare {node.a!r} ({sa.name}) with {node.b!r} ({sb.name})")
    elif isinstance(node, In):
        se, ss = _lookup(scope, node.elem), _lookup(scope, node.set)
        if not ss.is_set:
            raise FormulaSortError(f"{node.set!r} is not a set variable")
        if se is not ss.element:
            raise FormulaSortError(f"{node.elem!r} ({se.name}) cannot be a member of {node.set!r} ({ss.name})")
    elif isinstance(node, (Forall, Exists, Count)):
        var = node.var
        if isinstance(node, Count):
            if var.sort.is_set:
                raise FormulaSortError("counting quantifiers range over elements only")
            if node.k < 0:
                raise FormulaSortError("count must be nonnegative")
        if var.sort.is_edge:
            flags["edge"] = True
        elif var.sort.is_set:
            flags["set"] = True
        inner = dict(scope)
        inner[var.name] = var.sort
        _check(node.body, inner, flags)
    else:
        for ch in children(node):
            _check(ch, scope, flags)
