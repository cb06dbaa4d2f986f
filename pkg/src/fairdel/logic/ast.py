"""Formula AST for FO / MSO1 / MSO2 over graphs.

Atoms refer to variables by name; a name's sort comes from its binder (or
from the free-variable declaration of the enclosing :class:`Formula`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Union


class Sort(enum.Enum):
    VERTEX = "V"
    VERTEX_SET = "VS"
    EDGE = "E"
    EDGE_SET = "ES"

    @property
    def is_set(self) -> bool:
        return self in (Sort.VERTEX_SET, Sort.EDGE_SET)

    @property
    def is_edge(self) -> bool:
        return self in (Sort.EDGE, Sort.EDGE_SET)

    @property
    def element(self) -> "Sort":
        return {Sort.VERTEX_SET: Sort.VERTEX, Sort.EDGE_SET: Sort.EDGE}.get(self, self)


class Dialect(enum.Enum):
    FO = "FO"
    MSO1 = "MSO1"
    MSO2 = "MSO2"


def default_sort(name: str) -> Sort:
    return Sort.VERTEX_SET if name[:1].isupper() else Sort.VERTEX


@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Adj:
    a: str
    b: str


@dataclass(frozen=True)
class Inc:
    v: str
    e: str


@dataclass(frozen=True)
class Eq:
    a: str
    b: str


@dataclass(frozen=True)
class In:
    elem: str
    set: str


@dataclass(frozen=True)
class Not:
    arg: "Node"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Implies:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Iff:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Node"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Node"


@dataclass(frozen=True)
class Count:
    """Counting sugar: exactly ``k`` (``op == "="``) or at most ``k`` (``"<="``)."""

    op: str
    k: int
    var: Var
    body: "Node"


Node = Union[Const, Adj, Inc, Eq, In, Not, And, Or, Implies, Iff, Forall, Exists, Count]
Quant = (Forall, Exists, Count)
TRUE = Const(True)
FALSE = Const(False)


def conj(*args: Node) -> Node:
    flat = []
    for a in args:
        if isinstance(a, And):
            flat.extend(a.args)
        elif a != TRUE:
            flat.append(a)
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*args: Node) -> Node:
    flat = []
    for a in args:
        if isinstance(a, Or):
            flat.extend(a.args)
        elif a != FALSE:
            flat.append(a)
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def forall(vars_: list[Var], body: Node) -> Node:
    for v in reversed(vars_):
        body = Forall(v, body)
    return body


def exists(vars_: list[Var], body: Node) -> Node:
    for v in reversed(vars_):
        body = Exists(v, body)
    return body


def children(node: Node) -> tuple:
    if isinstance(node, (And, Or)):
        return node.args
    if isinstance(node, Not):
        return (node.arg,)
    if isinstance(node, (Implies, Iff)):
        return (node.left, node.right)
    if isinstance(node, Quant):
        return (node.body,)
    return ()


def walk(node: Node) -> Iterator[Node]:
    stack = [node]
    while stack:
        cur = stack.pop()
        yield cur
        stack.extend(reversed(children(cur)))


def atom_names(node: Node) -> tuple[str, ...]:
    if isinstance(node, (Adj, Eq)):
        return (node.a, node.b)
    if isinstance(node, Inc):
        return (node.v, node.e)
    if isinstance(node, In):
        return (node.elem, node.set)
    return ()


def free_names(node: Node) -> frozenset:
    """Names occurring free in ``node``."""
    if isinstance(node, Quant):
        return free_names(node.body) - {node.var.name}
    names = set(atom_names(node))
    for ch in children(node):
        names |= free_names(ch)
    return frozenset(names)


def all_names(node: Node) -> set[str]:
    out = set()
    for sub in walk(node):
        out.update(atom_names(sub))
        if isinstance(sub, Quant):
            out.add(sub.var.name)
    return out


@dataclass(frozen=True)
class Formula:
    """A sort-checked formula together with its declared free variables."""

    root: Node
    free: tuple[Var, ...] = ()
    dialect: Dialect = field(default=Dialect.FO, compare=False)

    def free_var(self, name: str) -> Var:
        for v in self.free:
            if v.name == name:
                return v
        raise KeyError(name)

    @property
    def free_sets(self) -> tuple[Var, ...]:
        return tuple(v for v in self.free if v.sort.is_set)

    def __str__(self) -> str:
        from .printer import format_formula

        return format_formula(self)
