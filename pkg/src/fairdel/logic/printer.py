"""Canonical text rendering; ``parse_formula(format_formula(f)) == f``."""

from __future__ import annotations

from .ast import (
    Adj,
    And,
    Const,
    Count,
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
    default_sort,
)

_SUFFIX = {Sort.VERTEX: "V", Sort.VERTEX_SET: "VS", Sort.EDGE: "E", Sort.EDGE_SET: "ES"}

# binding strength; higher binds tighter
_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}


def _var(v: Var, explicit: bool = False) -> str:
    if explicit or v.sort is not default_sort(v.name):
        return f"{v.name}^{_SUFFIX[v.sort]}"
    return v.name


def _quant_head(node) -> str:
    if isinstance(node, Count):
        return f"E{node.op}{node.k} {_var(node.var)}"
    letter = "A" if isinstance(node, Forall) else "E"
    return f"{letter}{_var(node.var)}"


def format_node(node: Node) -> str:
    return _fmt(node, 0)


def _fmt(node: Node, ctx: int) -> str:
    if isinstance(node, Const):
        return "true" if node.value else "false"
    if isinstance(node, Adj):
        return f"adj({node.a},{node.b})"
    if isinstance(node, Inc):
        return f"inc({node.v},{node.e})"
    if isinstance(node, Eq):
        return f"{node.a} = {node.b}"
    if isinstance(node, In):
        return f"{node.elem} in {node.set}"
    if isinstance(node, Not):
        arg = node.arg
        if isinstance(arg, (Eq, In)):
            return f"~({_fmt(arg, 0)})"
        if isinstance(arg, (Const, Adj, Inc, Not)):
            return "~" + _fmt(arg, 5)
        return f"~({_fmt(arg, 0)})"
    if isinstance(node, (Forall, Exists, Count)):
        text = f"{_quant_head(node)}. {_fmt(node.body, 0)}"
        return f"({text})" if ctx > 0 else text
    prec = _PREC[type(node)]
    if isinstance(node, (And, Or)):
        sep = " & " if isinstance(node, And) else " | "
        text = sep.join(_fmt(a, prec + 1) for a in node.args)
    elif isinstance(node, Implies):
        text = f"{_fmt(node.left, prec + 1)} -> {_fmt(node.right, prec)}"
    else:
        text = f"{_fmt(node.left, prec)} <-> {_fmt(node.right, prec + 1)}"
    return f"({text})" if ctx > prec else text


def format_formula(f: Formula) -> str:
    body = format_node(f.root)
    if f.free:
        header = ", ".join(_var(v, explicit=True) for v in f.free)
        return f"free: {header}\n{body}"
    return body
